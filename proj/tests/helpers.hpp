#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "coauth/synth.hpp"
#include "coauth/tokenize.hpp"
#include "coauth/topics.hpp"

namespace coauth::testing {

inline TokenizedCorpus tokenize_documents(const std::vector<Document>& docs, std::size_t min_count) {
  TextResources res;
  res.stopwords = {"the"};
  std::vector<RawTokens> raw;
  for (const auto& d : docs) raw.push_back({d.doc_id, d.month, preprocess_document(d, res)});
  return build_vocabulary(raw, min_count);
}

/// Planted phi expressed over the model vocabulary, one row per planted topic.
inline Matrix planted_over_vocabulary(const SyntheticCorpus& synth, const Vocabulary& vocab) {
  Matrix out(synth.planted_phi.rows(), vocab.size());
  for (std::size_t t = 0; t < out.rows(); ++t) {
    for (std::size_t j = 0; j < synth.terms.size(); ++j) {
      if (auto id = vocab.find(synth.terms[j])) out(t, *id) += synth.planted_phi(t, j);
    }
  }
  return out;
}

inline double total_variation(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

struct Matching {
  std::vector<std::size_t> learned_for_planted;
  double mean_tv = std::numeric_limits<double>::infinity();
};

/// Exhaustive search over permutations; k is small.
inline Matching best_matching(const Matrix& planted, const Matrix& learned) {
  std::vector<std::size_t> perm(planted.rows());
  std::iota(perm.begin(), perm.end(), 0);
  Matching best;
  do {
    double s = 0.0;
    for (std::size_t t = 0; t < perm.size(); ++t) s += total_variation(planted.row(t), learned.row(perm[t]));
    s /= static_cast<double>(perm.size());
    if (s < best.mean_tv) best = {perm, s};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace coauth::testing
