#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coauth/config.hpp"
#include "coauth/corpus.hpp"
#include "coauth/graphs.hpp"
#include "coauth/metrics.hpp"
#include "coauth/synth.hpp"
#include "coauth/topics.hpp"

namespace coauth {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Per-stage seeds are fixed offsets from the global seed.
namespace seed_offset {
inline constexpr std::uint64_t kTrain = 0;
inline constexpr std::uint64_t kInference = 1'000'003;  // + document index
inline constexpr std::uint64_t kPath = 2'000'003;       // + month index
inline constexpr std::uint64_t kNull = 3'000'017;       // + 1000 * topic + instance
inline constexpr std::uint64_t kSynth = 0;
}  // namespace seed_offset

/// A stopword or lexicon source: a file, or the list compiled into the library.
struct ResourceRef {
  std::optional<std::filesystem::path> path;  // nullopt = builtin

  std::string str() const { return path ? path->string() : std::string("builtin"); }
};

struct PipelineConfig {
  std::optional<std::filesystem::path> corpus;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;

  ResourceRef stopwords;
  std::optional<std::filesystem::path> custom_stopwords;
  std::optional<ResourceRef> lexicon = ResourceRef{};
  ParseOptions parse;
  std::optional<YearMonth> origin;  // month index 0; defaults to the earliest article
  NameConvention convention = NameConvention::kFullName;
  std::size_t min_count = 5;

  std::size_t k = 50;
  std::optional<double> alpha;  // defaults to 5/k
  double beta = 0.01;
  std::size_t iterations = 1000;
  InferenceConfig inference;
  std::size_t topwords_n = 20;

  AssignmentScheme scheme = AssignmentScheme::threshold(0.6);
  std::optional<std::vector<std::size_t>> topics;  // nullopt = every topic
  std::vector<EdgePolicy> policies{EdgePolicy::unlimited(), EdgePolicy::months(24), EdgePolicy::months(60),
                                   EdgePolicy::months(120)};
  std::size_t max_authors = 0;

  PathConfig path;  // seed is derived from `seed`
  ClassifierThresholds thresholds;
  std::size_t null_instances = 100;
  std::size_t null_articles = 0;  // 0 = the topic's own article count
  std::vector<EdgePolicy> null_policies{EdgePolicy::unlimited()};
  std::size_t threads = 1;

  std::optional<std::filesystem::path> apply_model;
  std::optional<std::filesystem::path> apply_corpus;
  /// Pre-tokenized corpus B; its vocabulary must be the model's.
  std::optional<std::filesystem::path> apply_tokens;

  SynthSpec synth;

  /// Builds from flat keys; unknown keys are Error(kConfig).
  static PipelineConfig from_keys(const KeyValueFile& keys);
  /// Effective configuration as flat keys, excluding the output directory.
  KeyValueFile echo() const;

  LdaConfig lda() const;
  std::uint64_t require_seed() const;
};

/// Documented configuration keys and their defaults.
const std::vector<std::pair<std::string, std::string>>& config_key_defaults();

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  /// Stages in dependency order; "run" executes ingest through report.
  static const std::vector<std::string>& stage_names();

  /// Throws Error(kDependency) naming the stage to run first when an input
  /// produced by an earlier stage is missing.
  void run_stage(std::string_view name);
  void run_all();

  const PipelineConfig& config() const { return config_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 public:
  struct StageRecord;

 private:
  void ingest(StageRecord& rec);
  void train(StageRecord& rec);
  void topwords(StageRecord& rec);
  void assign(StageRecord& rec);
  void assemble(StageRecord& rec);
  void measure(StageRecord& rec);
  void classify(StageRecord& rec);
  void null(StageRecord& rec);
  void modularity(StageRecord& rec);
  void report(StageRecord& rec);
  void synth(StageRecord& rec);
  void apply(StageRecord& rec);

  std::filesystem::path out(std::string_view rel) const;
  void require(std::string_view rel, std::string_view producer) const;
  void write(StageRecord& rec, std::string_view rel, std::string_view contents);
  std::vector<std::size_t> selected_topics(std::size_t k) const;
  void warn(std::string message);
  void update_manifest(const StageRecord& rec, double seconds);

  // Shared by assign/apply and assemble/apply.
  void write_assignments(StageRecord& rec, const std::vector<TopicAssignment>& assignments, std::size_t k);
  void write_series(StageRecord& rec, const std::vector<TopicAssignment>& assignments,
                    std::span<const Document> docs, std::size_t k, YearMonth origin);
  void write_curves(StageRecord& rec, std::size_t k);
  void write_classes(StageRecord& rec, std::size_t k);

  PipelineConfig config_;
  std::vector<std::string> warnings_;
};

/// Output file names, relative to the output directory.
std::string topic_tag(std::size_t topic);
std::string events_file(std::size_t topic);
std::string series_file(std::size_t topic, const EdgePolicy& policy);
std::string curve_file(std::size_t topic, const EdgePolicy& policy);
std::string null_file(std::size_t topic, const EdgePolicy& policy);

}  // namespace coauth
