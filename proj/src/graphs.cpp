#include "coauth/graphs.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "coauth/error.hpp"
#include "coauth/io.hpp"

namespace coauth {

namespace {

struct PendingEvent {
  int month_index;
  std::vector<std::string> labels;
  std::string doc_id;
};

CollaborationEventLog intern(std::vector<PendingEvent> pending, YearMonth origin,
                             NameConvention convention) {
  std::stable_sort(pending.begin(), pending.end(),
                   [](const PendingEvent& a, const PendingEvent& b) { return a.month_index < b.month_index; });
  CollaborationEventLog log;
  log.origin = origin;
  log.convention = convention;
  auto labels = std::make_shared<std::vector<std::string>>();
  std::unordered_map<std::string, NodeId> ids;
  log.events.reserve(pending.size());
  for (auto& p : pending) {
    CollaborationEvent ev{p.month_index, {}, std::move(p.doc_id)};
    for (auto& label : p.labels) {
      auto [it, inserted] = ids.try_emplace(label, static_cast<NodeId>(labels->size()));
      if (inserted) {
        labels->push_back(std::move(label));
        log.first_seen.push_back(p.month_index);
      }
      ev.authors.push_back(it->second);
    }
    std::sort(ev.authors.begin(), ev.authors.end());
    ev.authors.erase(std::unique(ev.authors.begin(), ev.authors.end()), ev.authors.end());
    log.events.push_back(std::move(ev));
  }
  log.labels = std::move(labels);
  return log;
}

}  // namespace

CollaborationEventLog build_events(std::span<const Document* const> docs, const EventOptions& options) {
  std::vector<PendingEvent> pending;
  pending.reserve(docs.size());
  for (const Document* doc : docs) {
    if (options.max_authors > 0 && doc->authors.size() > options.max_authors) continue;
    PendingEvent p{doc->month.months_since(options.origin), {}, doc->doc_id};
    if (p.month_index < 0)
      throw Error(ErrorCode::kInvalidArgument,
                  "document '" + doc->doc_id + "' predates origin " + options.origin.str());
    for (const auto& raw : doc->authors)
      p.labels.push_back(normalize_author(raw, options.convention, doc->doc_id).label);
    pending.push_back(std::move(p));
  }
  return intern(std::move(pending), options.origin, options.convention);
}

CollaborationEventLog build_events(std::span<const std::string> doc_ids,
                                   std::span<const Document> corpus, const EventOptions& options) {
  std::unordered_map<std::string_view, const Document*> index;
  index.reserve(corpus.size());
  for (const auto& d : corpus) index.emplace(d.doc_id, &d);
  std::vector<const Document*> docs;
  docs.reserve(doc_ids.size());
  for (const auto& id : doc_ids) {
    auto it = index.find(id);
    if (it == index.end())
      throw Error(ErrorCode::kInvalidArgument, "assigned document '" + id + "' is not in the corpus");
    docs.push_back(it->second);
  }
  return build_events(docs, options);
}

EdgePolicy EdgePolicy::months(int n) {
  if (n < 1) throw Error(ErrorCode::kConfig, "edge lifetime must be >= 1 month");
  return EdgePolicy{n};
}

std::string EdgePolicy::str() const {
  return lifetime ? std::to_string(*lifetime) : std::string("unlimited");
}

EdgePolicy EdgePolicy::parse(std::string_view text) {
  text = trim(text);
  if (text == "unlimited" || text == "none") return unlimited();
  return months(static_cast<int>(parse_int(text, "edge lifetime")));
}

namespace {

std::uint64_t edge_key(NodeId u, NodeId v) { return (std::uint64_t{u} << 32) | v; }

struct EdgeState {
  int last_collab = 0;
  std::uint32_t weight = 0;
  bool active = false;
};

}  // namespace

SnapshotSeries assemble_series(const CollaborationEventLog& log, const EdgePolicy& policy) {
  SnapshotSeries series;
  series.origin = log.origin;
  series.policy = policy;
  series.labels = log.labels;
  if (log.events.empty()) return series;

  // Ordered by key so each snapshot's edge list comes out sorted by (u, v).
  std::map<std::uint64_t, EdgeState> edges;
  using Expiry = std::pair<int, std::uint64_t>;
  std::priority_queue<Expiry, std::vector<Expiry>, std::greater<>> expiries;

  const int first = log.events.front().month_index;
  const int last = log.events.back().month_index;
  std::size_t next_event = 0;
  std::size_t n_nodes = 0;
  series.snapshots.reserve(static_cast<std::size_t>(last - first + 1));

  for (int month = first; month <= last; ++month) {
    for (; next_event < log.events.size() && log.events[next_event].month_index == month; ++next_event) {
      const auto& authors = log.events[next_event].authors;
      if (!authors.empty()) n_nodes = std::max<std::size_t>(n_nodes, authors.back() + 1);
      for (std::size_t i = 0; i < authors.size(); ++i) {
        for (std::size_t j = i + 1; j < authors.size(); ++j) {
          const auto key = edge_key(authors[i], authors[j]);
          EdgeState& st = edges[key];
          st.last_collab = month;
          ++st.weight;
          st.active = true;
          if (policy.lifetime) expiries.emplace(month + *policy.lifetime, key);
        }
      }
    }
    if (policy.lifetime) {
      while (!expiries.empty() && expiries.top().first <= month) {
        const auto key = expiries.top().second;
        expiries.pop();
        EdgeState& st = edges[key];
        if (st.active && month - st.last_collab >= *policy.lifetime) st.active = false;
      }
    }

    GraphSnapshot snap;
    snap.month_index = month;
    snap.n_nodes = n_nodes;
    snap.labels = log.labels;
    for (const auto& [key, st] : edges) {
      if (!st.active) continue;
      snap.edges.push_back({static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xFFFFFFFFu),
                            st.last_collab, st.weight});
    }
    series.snapshots.push_back(std::move(snap));
  }
  return series;
}

namespace {
constexpr std::string_view kEventsMagic = "coauth-events 1";
}

std::string serialize_events(const CollaborationEventLog& log) {
  std::string out;
  out += kEventsMagic;
  out += '\n';
  out += "origin " + log.origin.str() + '\n';
  out += "convention " + std::string(convention_name(log.convention)) + '\n';
  out += "events " + std::to_string(log.events.size()) + '\n';
  for (const auto& ev : log.events) {
    out += std::to_string(ev.month_index);
    out += '\t';
    out += ev.doc_id;
    for (NodeId a : ev.authors) {
      out += '\t';
      out += (*log.labels)[a];
    }
    out += '\n';
  }
  return out;
}

CollaborationEventLog parse_events(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kParse, "events: " + what); };
  auto value_of = [&](std::string_view key) -> std::string {
    if (!std::getline(in, line)) fail("truncated header");
    const auto sp = line.find(' ');
    if (sp == std::string::npos || std::string_view(line).substr(0, sp) != key)
      fail("expected '" + std::string(key) + "'");
    return line.substr(sp + 1);
  };
  if (!std::getline(in, line) || line != kEventsMagic) fail("bad header");
  const auto origin = YearMonth::parse(value_of("origin"));
  if (!origin) fail("bad origin");
  const auto convention = parse_convention(value_of("convention"));
  const auto n = static_cast<std::size_t>(parse_int(value_of("events"), "event count"));

  std::vector<PendingEvent> pending;
  pending.reserve(n);
  int prev_month = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) fail("truncated events");
    auto cols = split(line, '\t');
    if (cols.size() < 3) fail("event line " + std::to_string(i + 1) + " needs month, doc id, authors");
    PendingEvent p{static_cast<int>(parse_int(cols[0], "event month")), {}, cols[1]};
    if (p.month_index < 0 || (i > 0 && p.month_index < prev_month)) fail("events out of order");
    prev_month = p.month_index;
    for (std::size_t c = 2; c < cols.size(); ++c) p.labels.push_back(std::move(cols[c]));
    pending.push_back(std::move(p));
  }
  return intern(std::move(pending), *origin, convention);
}

std::string serialize_series_edges(const SnapshotSeries& series) {
  std::string out = "month\tu\tv\tlast_collab\n";
  for (const auto& snap : series.snapshots) {
    for (const auto& e : snap.edges) {
      out += std::to_string(snap.month_index);
      out += '\t';
      out += (*series.labels)[e.u];
      out += '\t';
      out += (*series.labels)[e.v];
      out += '\t';
      out += std::to_string(e.last_collab);
      out += '\n';
    }
  }
  return out;
}

}  // namespace coauth
