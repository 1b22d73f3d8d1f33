#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coauth/rng.hpp"
#include "coauth/tokenize.hpp"

namespace coauth {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct LdaConfig {
  std::size_t k = 50;
  double alpha = 0.1;  // per topic
  double beta = 0.01;  // per term
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;

  /// alpha = 5/k, beta = 0.01, 1000 sweeps.
  static LdaConfig defaults(std::size_t k, std::uint64_t seed);
  void validate() const;
};

struct TopicModel {
  LdaConfig config;
  Vocabulary vocabulary;
  Matrix phi;    // k x V
  Matrix theta;  // D x k, empty when not retained
  std::vector<std::string> theta_doc_ids;
  std::vector<std::string> warnings;

  std::size_t k() const { return phi.rows(); }
};

/// Collapsed Gibbs sampler over a fixed document set. Tokens are visited in
/// document order, then position order, so the chain depends on term ids only
/// through count lookups.
class GibbsSampler {
 public:
  GibbsSampler(std::span<const TokenizedDoc> docs, std::size_t vocab_size, const LdaConfig& config);

  void sweep();

  std::size_t topics() const { return k_; }
  std::size_t vocab_size() const { return v_; }
  std::size_t total_tokens() const { return assignments_.size(); }

  std::uint32_t topic_term_count(std::size_t topic, TermId term) const {
    return term_topic_[term * k_ + topic];
  }
  std::uint32_t topic_total(std::size_t topic) const { return topic_total_[topic]; }
  std::uint32_t doc_topic_count(std::size_t doc, std::size_t topic) const {
    return doc_topic_[doc * k_ + topic];
  }
  std::size_t doc_length(std::size_t doc) const { return doc_offset_[doc + 1] - doc_offset_[doc]; }
  std::size_t documents() const { return doc_offset_.size() - 1; }

  Matrix phi() const;
  Matrix theta() const;

 private:
  std::size_t k_;
  std::size_t v_;
  double alpha_;
  double beta_;
  Rng rng_;
  std::vector<TermId> words_;
  std::vector<std::uint32_t> assignments_;
  std::vector<std::size_t> doc_offset_;
  std::vector<std::uint32_t> term_topic_;  // V x k
  std::vector<std::uint32_t> doc_topic_;   // D x k
  std::vector<std::uint32_t> topic_total_;
  std::vector<double> cumulative_;
};

/// Runs config.iterations sweeps and returns smoothed phi and theta.
/// Throws Error(kInvalidArgument) on an empty corpus.
TopicModel train_lda(std::span<const TokenizedDoc> docs, const Vocabulary& vocabulary,
                     const LdaConfig& config);

struct InferenceConfig {
  std::size_t sweeps = 200;
  std::size_t window = 100;  // trailing sweeps averaged

  void validate() const;
};

/// Topic mixture of an unseen document under fixed phi. Token ids must index
/// the model vocabulary; ids outside it are ignored.
std::vector<double> infer_theta(const TopicModel& model, const TokenizedDoc& doc,
                                std::uint64_t seed, const InferenceConfig& config = {});

struct RankedTerm {
  std::string term;
  double probability = 0.0;
};

std::vector<RankedTerm> top_words(const TopicModel& model, std::size_t topic, std::size_t n);

struct AssignmentScheme {
  enum class Kind { kThreshold, kCoverage };

  Kind kind = Kind::kThreshold;
  double value = 0.6;

  static AssignmentScheme threshold(double tau) { return {Kind::kThreshold, tau}; }
  static AssignmentScheme coverage(double c) { return {Kind::kCoverage, c}; }

  void validate() const;
  /// "threshold:0.6" or "coverage:0.5"
  std::string str() const;
  static AssignmentScheme parse(std::string_view text);

  bool operator==(const AssignmentScheme&) const = default;
};

struct TopicAssignment {
  std::string doc_id;
  std::vector<std::size_t> topics;  // ascending
  AssignmentScheme scheme;

  bool operator==(const TopicAssignment&) const = default;
};

/// Topics selected for one row of theta, ascending.
std::vector<std::size_t> assign_row(std::span<const double> theta_row, const AssignmentScheme& scheme);

std::vector<TopicAssignment> assign_articles(const Matrix& thetas,
                                             std::span<const std::string> doc_ids,
                                             const AssignmentScheme& scheme);

/// Model file, see docs/formats.md.
std::string serialize_model(const TopicModel& model, bool include_theta);
TopicModel parse_model(std::string_view text);

std::string serialize_top_words(const TopicModel& model, std::size_t n);

std::string serialize_assignments(std::span<const TopicAssignment> assignments);
std::vector<TopicAssignment> parse_assignments(std::string_view text);

}  // namespace coauth
