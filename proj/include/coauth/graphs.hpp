#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coauth/corpus.hpp"
#include "coauth/month.hpp"

namespace coauth {

using NodeId = std::uint32_t;
using Labels = std::shared_ptr<const std::vector<std::string>>;

struct CollaborationEvent {
  int month_index = 0;
  std::vector<NodeId> authors;  // ascending, deduplicated
  std::string doc_id;
};

/// Time-ordered clique events of one article set. Node ids are assigned in
/// first-seen order, so the authors present at any month form a prefix
/// [0, n) of the id space.
struct CollaborationEventLog {
  YearMonth origin;
  NameConvention convention = NameConvention::kFullName;
  std::vector<CollaborationEvent> events;  // sorted by month_index
  Labels labels;                           // node id -> normalized author label
  std::vector<int> first_seen;             // node id -> month_index

  std::size_t node_count() const { return first_seen.size(); }
};

struct EventOptions {
  NameConvention convention = NameConvention::kFullName;
  YearMonth origin;
  /// Articles with more authors than this are skipped; 0 disables the cap.
  std::size_t max_authors = 0;
};

/// One event per article, in month order (ties keep input order).
/// Throws Error(kInvalidArgument) for a doc_id absent from the corpus.
CollaborationEventLog build_events(std::span<const std::string> doc_ids,
                                   std::span<const Document> corpus, const EventOptions& options);
CollaborationEventLog build_events(std::span<const Document* const> docs, const EventOptions& options);

struct EdgePolicy {
  std::optional<int> lifetime;  // months; nullopt = edges never expire

  static EdgePolicy unlimited() { return {}; }
  static EdgePolicy months(int n);

  bool is_unlimited() const { return !lifetime.has_value(); }
  /// "unlimited" or the lifetime in months
  std::string str() const;
  static EdgePolicy parse(std::string_view text);

  bool operator==(const EdgePolicy&) const = default;
};

struct Edge {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  int last_collab = 0;
  std::uint32_t weight = 0;  // joint articles so far; reporting only

  bool operator==(const Edge&) const = default;
};

struct GraphSnapshot {
  int month_index = 0;
  std::size_t n_nodes = 0;  // nodes are ids [0, n_nodes)
  std::vector<Edge> edges;  // sorted by (u, v)
  Labels labels;
};

struct SnapshotSeries {
  YearMonth origin;
  EdgePolicy policy;
  Labels labels;
  std::vector<GraphSnapshot> snapshots;  // consecutive months
};

/// Incrementally replays the log into one snapshot per month from the first
/// to the last event month.
SnapshotSeries assemble_series(const CollaborationEventLog& log, const EdgePolicy& policy);

/// Event-log file, see docs/formats.md.
std::string serialize_events(const CollaborationEventLog& log);
CollaborationEventLog parse_events(std::string_view text);

/// Tab-separated "month u v last_collab" rows for every snapshot.
std::string serialize_series_edges(const SnapshotSeries& series);

}  // namespace coauth
