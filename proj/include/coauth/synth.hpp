#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "coauth/corpus.hpp"
#include "coauth/topics.hpp"

namespace coauth {

/// Parameters of a planted-topic, planted-community corpus.
struct SynthSpec {
  std::size_t topics = 5;
  std::size_t vocab_per_topic = 40;     // disjoint per topic
  double zipf_exponent = 1.0;           // planted phi over a topic's terms
  std::size_t docs_per_topic = 400;
  std::size_t title_words = 6;
  std::size_t abstract_words = 54;
  double purity = 0.9;                  // share of tokens drawn from the primary topic
  std::size_t months = 120;
  YearMonth start{2000, 1};
  std::size_t min_authors = 2;
  std::size_t max_authors = 4;
  /// Per-topic probability that an author slot reuses an earlier author of the
  /// same topic, reached at the final month; it ramps linearly from 0. Missing
  /// entries repeat the last value; empty means 0 for all topics.
  std::vector<double> mixing;
  /// Probability that an author appearance uses an abbreviated name form.
  double name_variant_rate = 0.0;

  void validate() const;
  double mixing_for(std::size_t topic) const;
};

struct SyntheticCorpus {
  std::vector<Document> documents;        // chronological
  std::vector<std::size_t> primary_topic; // per document
  std::vector<std::string> terms;         // planted vocabulary, topic-major
  Matrix planted_phi;                     // topics x terms
};

/// Throws Error(kConfig) for an infeasible spec.
SyntheticCorpus generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

/// Documents whose every token comes from `topic`; authors are fresh.
std::vector<Document> generate_single_topic_docs(const SynthSpec& spec, const SyntheticCorpus& planted,
                                                 std::size_t topic, std::size_t count, std::uint64_t seed);

/// "doc_id<TAB>topic" per line with a header.
std::string serialize_truth(const SyntheticCorpus& corpus);
/// "topic<TAB>term<TAB>probability" for every nonzero planted entry.
std::string serialize_planted_phi(const SyntheticCorpus& corpus);

/// Reads synth.* keys ("synth.topics = 5"); unknown synth.* keys are errors.
SynthSpec synth_spec_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

/// Pseudo-word made of consonant-vowel syllables; never ends in 's'.
std::string pseudo_word(std::uint64_t index, std::size_t syllables);

}  // namespace coauth
