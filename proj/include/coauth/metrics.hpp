#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coauth/corpus.hpp"
#include "coauth/graphs.hpp"

namespace coauth {

// ---------------------------------------------------------------------------
// Components and path lengths

struct ComponentPartition {
  std::vector<std::size_t> component_of;        // node id -> component index
  std::vector<std::vector<NodeId>> components;  // members ascending; ordered by smallest member label
};

ComponentPartition connected_components(const GraphSnapshot& snapshot);

/// Index of the largest component; ties go to the lower component index.
std::size_t largest_component(const ComponentPartition& partition);

/// |largest component| / n_nodes. Throws Error(kDomain) on an empty snapshot.
double gcc_fraction(const GraphSnapshot& snapshot);

struct PathMode {
  enum class Kind { kExact, kSampled, kNone };

  Kind kind = Kind::kNone;
  std::size_t sources = 0;

  static PathMode exact() { return {Kind::kExact, 0}; }
  static PathMode sampled(std::size_t s) { return {Kind::kSampled, s}; }

  /// "exact", "sampled:<s>" or "none"
  std::string str() const;
  bool operator==(const PathMode&) const = default;
};

struct PathConfig {
  /// Exact all-pairs search up to this GCC size, sampled sources beyond it.
  std::size_t exact_limit = 2000;
  std::size_t sources = 1000;
  std::uint64_t seed = 0;
};

struct PathLength {
  std::optional<double> value;  // absent when the GCC has fewer than 2 nodes
  PathMode mode;
};

/// Mean geodesic distance within the largest component under an explicit mode.
/// Sampled mode averages distances from `mode.sources` seeded-random sources
/// (all GCC nodes when sources >= GCC size) to every other GCC node.
PathLength mean_path_length(const GraphSnapshot& snapshot, const PathMode& mode, std::uint64_t seed);

/// Picks the mode from PathConfig by GCC size.
PathLength mean_path_length(const GraphSnapshot& snapshot, const PathConfig& config);

// ---------------------------------------------------------------------------
// Curves

struct MetricPoint {
  int month_index = 0;
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  std::size_t gcc_nodes = 0;
  double gcc_fraction = 0.0;
  std::optional<double> mean_path_length;
  PathMode path_mode;
};

struct MetricCurve {
  YearMonth origin;
  std::vector<MetricPoint> points;
};

/// One point per snapshot. The sampling seed for month m is config.seed + m.
MetricCurve measure_series(const SnapshotSeries& series, const PathConfig& config);

std::string serialize_curve(const MetricCurve& curve);
MetricCurve parse_curve(std::string_view text);

// ---------------------------------------------------------------------------
// Assembly classification

enum class AssemblyClass { kNoGC, kTreelikeGC, kDenseGC };

std::string_view assembly_class_name(AssemblyClass c);

struct ClassifierThresholds {
  double f_dense = 0.25;
  double f_tree = 0.10;
  double decline = 0.10;
  std::size_t smoothing_window = 5;

  void validate() const;
};

struct AssemblyDiagnostics {
  double final_gcc_fraction = 0.0;
  std::optional<std::size_t> peak_index;  // into the defined-path-length points
  std::optional<std::size_t> peak_n_nodes;
  std::optional<int> peak_month_index;
  double peak_path_length = 0.0;
  double final_path_length = 0.0;
  double decline_ratio = 0.0;  // (peak - final) / peak on the smoothed curve
  std::size_t smoothing_window = 0;  // window actually applied
};

struct AssemblyResult {
  AssemblyClass assembly_class = AssemblyClass::kNoGC;
  AssemblyDiagnostics diagnostics;
};

/// Throws Error(kDomain) ("unclassifiable") when fewer than 3 points carry a
/// path length.
AssemblyResult classify_assembly(const MetricCurve& curve, const ClassifierThresholds& thresholds = {});

/// Centered moving average with windows truncated at both ends.
std::vector<double> smooth(std::span<const double> values, std::size_t window);

// ---------------------------------------------------------------------------
// Null model

struct NullBin {
  int bin = 0;  // see size_bin
  double lo = 0.0;
  double hi = 0.0;
  double mean_gcc_fraction = 0.0;
  double std_gcc_fraction = 0.0;
  std::optional<double> mean_mpl;
  std::optional<double> std_mpl;
  std::size_t instances = 0;  // instances with a point in this bin
};

struct NullBand {
  std::vector<NullBin> bins;  // ascending
  std::size_t n_instances = 0;
  std::size_t article_count = 0;
  std::uint64_t seed = 0;

  /// Bin containing n_nodes, else the nearest populated bin.
  const NullBin* bin_for(std::size_t n_nodes) const;
};

/// Geometric bin index with 20 bins per decade: 10^(b/20) <= n < 10^((b+1)/20).
int size_bin(std::size_t n_nodes);
double size_bin_edge(int bin);

struct NullModelConfig {
  std::size_t n_articles = 0;
  std::size_t n_instances = 100;
  EdgePolicy policy;
  std::uint64_t seed = 0;
  PathConfig path;
  EventOptions events;  // convention, origin, author cap
  std::size_t threads = 1;
};

/// Instance i draws n_articles documents without replacement with seed + i.
NullBand null_model(std::span<const Document> corpus, const NullModelConfig& config);

/// Per-bin mean and population standard deviation over instance curves, in
/// instance order.
NullBand aggregate_null(std::span<const MetricCurve> instances);

std::string serialize_null_band(const NullBand& band);
NullBand parse_null_band(std::string_view text);

// ---------------------------------------------------------------------------
// Modularity between two topics' author sets

enum class Membership : std::uint8_t { kXOnly, kYOnly, kBoth };

struct CommunityLabeling {
  std::vector<Membership> labels;               // node -> membership
  std::vector<std::pair<NodeId, NodeId>> edges;  // undirected, no duplicates or loops
};

/// Normalized modularity Q/Qmax. Edges touching a kBoth node never count as
/// same-community. A network whose edge endpoints all carry one pure label
/// scores 0. Throws Error(kDomain) when there are no edges.
double pairwise_modularity(const CommunityLabeling& labeling);

/// Labels the union of two topics' final (unlimited) co-authorship networks.
CommunityLabeling label_topic_pair(const CollaborationEventLog& x, const CollaborationEventLog& y);

}  // namespace coauth
