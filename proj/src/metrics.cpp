#include "coauth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "coauth/error.hpp"
#include "coauth/io.hpp"
#include "coauth/rng.hpp"

namespace coauth {

namespace {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

// Compressed adjacency over nodes [0, n).
struct Adjacency {
  std::vector<std::size_t> offset;
  std::vector<NodeId> target;

  Adjacency(std::size_t n, std::span<const Edge> edges) : offset(n + 1, 0), target(edges.size() * 2) {
    for (const auto& e : edges) {
      ++offset[e.u + 1];
      ++offset[e.v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offset[i + 1] += offset[i];
    std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
    for (const auto& e : edges) {
      target[fill[e.u]++] = e.v;
      target[fill[e.v]++] = e.u;
    }
  }
};

// Sum of BFS distances from `source` to every node it reaches.
std::uint64_t distance_sum(const Adjacency& adj, NodeId source, std::vector<int>& dist,
                           std::vector<NodeId>& queue) {
  std::fill(dist.begin(), dist.end(), -1);
  queue.clear();
  queue.push_back(source);
  dist[source] = 0;
  std::uint64_t total = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    const int du = dist[u];
    total += static_cast<std::uint64_t>(du);
    for (std::size_t i = adj.offset[u]; i < adj.offset[u + 1]; ++i) {
      const NodeId v = adj.target[i];
      if (dist[v] < 0) {
        dist[v] = du + 1;
        queue.push_back(v);
      }
    }
  }
  return total;
}

}  // namespace

ComponentPartition connected_components(const GraphSnapshot& snapshot) {
  const std::size_t n = snapshot.n_nodes;
  DisjointSet dsu(n);
  for (const auto& e : snapshot.edges) dsu.unite(e.u, e.v);

  std::unordered_map<std::size_t, std::size_t> root_slot;
  std::vector<std::vector<NodeId>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = root_slot.try_emplace(dsu.find(i), groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(static_cast<NodeId>(i));
  }

  const auto& labels = *snapshot.labels;
  std::vector<std::size_t> order(groups.size());
  std::vector<const std::string*> min_label(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string* best = &labels[groups[g].front()];
    for (NodeId v : groups[g]) {
      if (labels[v] < *best) best = &labels[v];
    }
    min_label[g] = best;
  }
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return *min_label[a] < *min_label[b]; });

  ComponentPartition out;
  out.component_of.assign(n, 0);
  out.components.reserve(groups.size());
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    for (NodeId v : groups[order[idx]]) out.component_of[v] = idx;
    out.components.push_back(std::move(groups[order[idx]]));
  }
  return out;
}

std::size_t largest_component(const ComponentPartition& partition) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < partition.components.size(); ++i) {
    if (partition.components[i].size() > partition.components[best].size()) best = i;
  }
  return best;
}

double gcc_fraction(const GraphSnapshot& snapshot) {
  if (snapshot.n_nodes == 0) throw Error(ErrorCode::kDomain, "gcc_fraction of an empty snapshot");
  const auto partition = connected_components(snapshot);
  return static_cast<double>(partition.components[largest_component(partition)].size()) /
         static_cast<double>(snapshot.n_nodes);
}

std::string PathMode::str() const {
  switch (kind) {
    case Kind::kExact: return "exact";
    case Kind::kSampled: return "sampled:" + std::to_string(sources);
    case Kind::kNone: break;
  }
  return "none";
}

namespace {

PathMode parse_path_mode(std::string_view text) {
  if (text == "exact") return PathMode::exact();
  if (text == "none") return {};
  if (text.substr(0, 8) == "sampled:")
    return PathMode::sampled(static_cast<std::size_t>(parse_int(text.substr(8), "path mode sources")));
  throw Error(ErrorCode::kParse, "unknown path mode '" + std::string(text) + "'");
}

PathLength path_length_in(const GraphSnapshot& snapshot, const std::vector<NodeId>& gcc,
                          const PathMode& mode, std::uint64_t seed) {
  if (gcc.size() < 2) return {std::nullopt, PathMode{}};
  const Adjacency adj(snapshot.n_nodes, snapshot.edges);
  std::vector<int> dist(snapshot.n_nodes);
  std::vector<NodeId> queue;
  queue.reserve(gcc.size());

  std::vector<NodeId> sources = gcc;
  if (mode.kind == PathMode::Kind::kSampled) {
    if (mode.sources < 1) throw Error(ErrorCode::kConfig, "sampled path length needs >= 1 source");
    const std::size_t take = std::min(mode.sources, sources.size());
    Rng rng(seed);
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(sources.size() - i));
      std::swap(sources[i], sources[j]);
    }
    sources.resize(take);
  }
  std::uint64_t total = 0;
  for (NodeId s : sources) total += distance_sum(adj, s, dist, queue);
  const double pairs = static_cast<double>(sources.size()) * static_cast<double>(gcc.size() - 1);
  return {static_cast<double>(total) / pairs, mode};
}

}  // namespace

PathLength mean_path_length(const GraphSnapshot& snapshot, const PathMode& mode, std::uint64_t seed) {
  if (snapshot.n_nodes == 0) return {};
  const auto partition = connected_components(snapshot);
  return path_length_in(snapshot, partition.components[largest_component(partition)], mode, seed);
}

PathLength mean_path_length(const GraphSnapshot& snapshot, const PathConfig& config) {
  if (snapshot.n_nodes == 0) return {};
  const auto partition = connected_components(snapshot);
  const auto& gcc = partition.components[largest_component(partition)];
  const PathMode mode = gcc.size() <= config.exact_limit ? PathMode::exact() : PathMode::sampled(config.sources);
  return path_length_in(snapshot, gcc, mode, config.seed);
}

MetricCurve measure_series(const SnapshotSeries& series, const PathConfig& config) {
  if (series.snapshots.empty()) throw Error(ErrorCode::kInvalidArgument, "measure: empty series");
  MetricCurve curve;
  curve.origin = series.origin;
  curve.points.reserve(series.snapshots.size());
  for (const auto& snap : series.snapshots) {
    MetricPoint p;
    p.month_index = snap.month_index;
    p.n_nodes = snap.n_nodes;
    p.n_edges = snap.edges.size();
    if (snap.n_nodes == 0) throw Error(ErrorCode::kDomain, "measure: snapshot without nodes");
    const auto partition = connected_components(snap);
    const auto& gcc = partition.components[largest_component(partition)];
    p.gcc_nodes = gcc.size();
    p.gcc_fraction = static_cast<double>(gcc.size()) / static_cast<double>(snap.n_nodes);
    const PathMode mode =
        gcc.size() <= config.exact_limit ? PathMode::exact() : PathMode::sampled(config.sources);
    const auto pl = path_length_in(snap, gcc, mode,
                                   config.seed + static_cast<std::uint64_t>(snap.month_index));
    p.mean_path_length = pl.value;
    p.path_mode = pl.mode;
    curve.points.push_back(p);
  }
  return curve;
}

namespace {
constexpr std::string_view kCurveHeader =
    "month_index,year_month,n_nodes,n_edges,gcc_nodes,gcc_fraction,mean_path_length,path_mode";
constexpr std::string_view kNullHeader = "bin_lo,bin_hi,mean_gcc_fraction,std_gcc_fraction,mean_mpl,std_mpl";

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); }

std::optional<double> parse_opt(std::string_view text, std::string_view what) {
  if (text == "NA") return std::nullopt;
  return parse_double(text, what);
}
}  // namespace

std::string serialize_curve(const MetricCurve& curve) {
  std::string out(kCurveHeader);
  out += '\n';
  for (const auto& p : curve.points) {
    out += std::to_string(p.month_index) + ',' + curve.origin.plus_months(p.month_index).str() + ',' +
           std::to_string(p.n_nodes) + ',' + std::to_string(p.n_edges) + ',' + std::to_string(p.gcc_nodes) +
           ',' + format_double(p.gcc_fraction) + ',' + opt_field(p.mean_path_length) + ',' +
           p.path_mode.str() + '\n';
  }
  return out;
}

MetricCurve parse_curve(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0] != kCurveHeader) throw Error(ErrorCode::kParse, "curve: bad header");
  MetricCurve curve;
  bool have_origin = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto c = split(lines[i], ',');
    if (c.size() != 8) throw Error(ErrorCode::kParse, "curve: line " + std::to_string(i + 1) + " needs 8 columns");
    MetricPoint p;
    p.month_index = static_cast<int>(parse_int(c[0], "month_index"));
    if (!have_origin) {
      const auto ym = YearMonth::parse(c[1]);
      if (!ym) throw Error(ErrorCode::kParse, "curve: bad year_month");
      curve.origin = ym->plus_months(-p.month_index);
      have_origin = true;
    }
    p.n_nodes = static_cast<std::size_t>(parse_int(c[2], "n_nodes"));
    p.n_edges = static_cast<std::size_t>(parse_int(c[3], "n_edges"));
    p.gcc_nodes = static_cast<std::size_t>(parse_int(c[4], "gcc_nodes"));
    p.gcc_fraction = parse_double(c[5], "gcc_fraction");
    p.mean_path_length = parse_opt(c[6], "mean_path_length");
    p.path_mode = parse_path_mode(c[7]);
    curve.points.push_back(p);
  }
  return curve;
}

std::string_view assembly_class_name(AssemblyClass c) {
  switch (c) {
    case AssemblyClass::kNoGC: return "NoGC";
    case AssemblyClass::kTreelikeGC: return "TreelikeGC";
    case AssemblyClass::kDenseGC: return "DenseGC";
  }
  return "NoGC";
}

void ClassifierThresholds::validate() const {
  if (!(f_dense > 0.0 && f_dense <= 1.0) || !(f_tree > 0.0 && f_tree <= 1.0))
    throw Error(ErrorCode::kConfig, "classifier: fractions must lie in (0,1]");
  if (!(decline > 0.0 && decline < 1.0)) throw Error(ErrorCode::kConfig, "classifier: decline must lie in (0,1)");
  if (smoothing_window < 1) throw Error(ErrorCode::kConfig, "classifier: smoothing window must be >= 1");
}

std::vector<double> smooth(std::span<const double> values, std::size_t window) {
  const std::size_t half = window / 2;
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(values.size() - 1, i + half);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += values[j];
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

AssemblyResult classify_assembly(const MetricCurve& curve, const ClassifierThresholds& thresholds) {
  thresholds.validate();
  std::vector<double> mpl;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (curve.points[i].mean_path_length) {
      mpl.push_back(*curve.points[i].mean_path_length);
      where.push_back(i);
    }
  }
  if (mpl.size() < 3)
    throw Error(ErrorCode::kDomain, "unclassifiable: curve has " + std::to_string(mpl.size()) +
                                        " points with a path length, need 3");

  // A window wider than a third of the curve would flatten any interior peak.
  std::size_t window = std::min(thresholds.smoothing_window, std::max<std::size_t>(1, mpl.size() / 3));
  if (window % 2 == 0) --window;
  const auto smoothed = smooth(mpl, window);

  AssemblyResult result;
  auto& diag = result.diagnostics;
  diag.smoothing_window = window;
  diag.final_gcc_fraction = curve.points.back().gcc_fraction;
  const auto peak_it = std::max_element(smoothed.begin(), smoothed.end());
  const auto peak = static_cast<std::size_t>(peak_it - smoothed.begin());
  diag.peak_path_length = *peak_it;
  diag.final_path_length = smoothed.back();
  diag.decline_ratio = *peak_it > 0.0 ? (*peak_it - smoothed.back()) / *peak_it : 0.0;
  const bool interior = peak > 0 && peak + 1 < smoothed.size();
  if (interior) {
    diag.peak_index = peak;
    diag.peak_n_nodes = curve.points[where[peak]].n_nodes;
    diag.peak_month_index = curve.points[where[peak]].month_index;
  }

  if (diag.final_gcc_fraction >= thresholds.f_dense && interior && diag.decline_ratio >= thresholds.decline) {
    result.assembly_class = AssemblyClass::kDenseGC;
  } else if (diag.final_gcc_fraction >= thresholds.f_tree) {
    result.assembly_class = AssemblyClass::kTreelikeGC;
  } else {
    result.assembly_class = AssemblyClass::kNoGC;
  }
  return result;
}

int size_bin(std::size_t n_nodes) {
  if (n_nodes == 0) throw Error(ErrorCode::kDomain, "size_bin of zero nodes");
  const double n = static_cast<double>(n_nodes);
  int b = static_cast<int>(std::floor(20.0 * std::log10(n)));
  while (b > 0 && size_bin_edge(b) > n) --b;
  while (size_bin_edge(b + 1) <= n) ++b;
  return b;
}

double size_bin_edge(int bin) { return std::pow(10.0, static_cast<double>(bin) / 20.0); }

const NullBin* NullBand::bin_for(std::size_t n_nodes) const {
  if (bins.empty() || n_nodes == 0) return nullptr;
  const int b = size_bin(n_nodes);
  const NullBin* best = &bins.front();
  for (const auto& bin : bins) {
    if (std::abs(bin.bin - b) < std::abs(best->bin - b)) best = &bin;
  }
  return best;
}

NullBand aggregate_null(std::span<const MetricCurve> instances) {
  struct Acc {
    std::vector<double> gcc;
    std::vector<double> mpl;
  };
  std::map<int, Acc> per_bin;
  for (const auto& curve : instances) {
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> mine;
    for (const auto& p : curve.points) {
      auto& slot = mine[size_bin(p.n_nodes)];
      slot.first.push_back(p.gcc_fraction);
      if (p.mean_path_length) slot.second.push_back(*p.mean_path_length);
    }
    for (const auto& [b, vals] : mine) {
      auto& acc = per_bin[b];
      acc.gcc.push_back(std::accumulate(vals.first.begin(), vals.first.end(), 0.0) /
                        static_cast<double>(vals.first.size()));
      if (!vals.second.empty())
        acc.mpl.push_back(std::accumulate(vals.second.begin(), vals.second.end(), 0.0) /
                          static_cast<double>(vals.second.size()));
    }
  }
  auto mean_std = [](const std::vector<double>& xs) {
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / static_cast<double>(xs.size()))};
  };

  NullBand band;
  band.n_instances = instances.size();
  for (const auto& [b, acc] : per_bin) {
    NullBin bin;
    bin.bin = b;
    bin.lo = size_bin_edge(b);
    bin.hi = size_bin_edge(b + 1);
    std::tie(bin.mean_gcc_fraction, bin.std_gcc_fraction) = mean_std(acc.gcc);
    if (!acc.mpl.empty()) {
      auto [m, s] = mean_std(acc.mpl);
      bin.mean_mpl = m;
      bin.std_mpl = s;
    }
    bin.instances = acc.gcc.size();
    band.bins.push_back(bin);
  }
  return band;
}

NullBand null_model(std::span<const Document> corpus, const NullModelConfig& config) {
  if (config.n_instances < 1) throw Error(ErrorCode::kConfig, "null model needs >= 1 instance");
  if (config.n_articles < 1) throw Error(ErrorCode::kConfig, "null model needs >= 1 article");
  if (config.n_articles > corpus.size())
    throw Error(ErrorCode::kInvalidArgument, "null model: n_articles " + std::to_string(config.n_articles) +
                                                 " exceeds corpus size " + std::to_string(corpus.size()));

  auto run_instance = [&](std::size_t i) {
    Rng rng(config.seed + i);
    std::vector<std::size_t> idx(corpus.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t j = 0; j < config.n_articles; ++j) {
      const std::size_t pick = j + static_cast<std::size_t>(rng.below(idx.size() - j));
      std::swap(idx[j], idx[pick]);
    }
    idx.resize(config.n_articles);
    std::sort(idx.begin(), idx.end());
    std::vector<const Document*> docs;
    docs.reserve(idx.size());
    for (std::size_t j : idx) docs.push_back(&corpus[j]);
    const auto log = build_events(docs, config.events);
    return measure_series(assemble_series(log, config.policy), config.path);
  };

  std::vector<MetricCurve> curves(config.n_instances);
  const std::size_t threads = std::max<std::size_t>(1, config.threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < config.n_instances; ++i) curves[i] = run_instance(i);
  } else {
    for (std::size_t start = 0; start < config.n_instances; start += threads) {
      std::vector<std::future<MetricCurve>> batch;
      const std::size_t end = std::min(config.n_instances, start + threads);
      for (std::size_t i = start; i < end; ++i) batch.push_back(std::async(std::launch::async, run_instance, i));
      for (std::size_t i = start; i < end; ++i) curves[i] = batch[i - start].get();
    }
  }

  NullBand band = aggregate_null(curves);
  band.article_count = config.n_articles;
  band.seed = config.seed;
  return band;
}

std::string serialize_null_band(const NullBand& band) {
  std::string out(kNullHeader);
  out += '\n';
  for (const auto& b : band.bins) {
    out += format_double(b.lo) + ',' + format_double(b.hi) + ',' + format_double(b.mean_gcc_fraction) + ',' +
           format_double(b.std_gcc_fraction) + ',' + opt_field(b.mean_mpl) + ',' + opt_field(b.std_mpl) + '\n';
  }
  return out;
}

NullBand parse_null_band(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0] != kNullHeader) throw Error(ErrorCode::kParse, "null band: bad header");
  NullBand band;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto c = split(lines[i], ',');
    if (c.size() != 6) throw Error(ErrorCode::kParse, "null band: line " + std::to_string(i + 1) + " needs 6 columns");
    NullBin bin;
    bin.lo = parse_double(c[0], "bin_lo");
    bin.hi = parse_double(c[1], "bin_hi");
    bin.bin = static_cast<int>(std::lround(20.0 * std::log10(bin.lo)));
    bin.mean_gcc_fraction = parse_double(c[2], "mean_gcc_fraction");
    bin.std_gcc_fraction = parse_double(c[3], "std_gcc_fraction");
    bin.mean_mpl = parse_opt(c[4], "mean_mpl");
    bin.std_mpl = parse_opt(c[5], "std_mpl");
    band.bins.push_back(bin);
  }
  return band;
}

double pairwise_modularity(const CommunityLabeling& labeling) {
  const auto m = static_cast<std::uint64_t>(labeling.edges.size());
  if (m == 0) throw Error(ErrorCode::kDomain, "modularity undefined: network has no edges");
  std::vector<std::uint64_t> degree(labeling.labels.size(), 0);
  std::uint64_t same = 0;
  for (const auto& [a, b] : labeling.edges) {
    if (a >= labeling.labels.size() || b >= labeling.labels.size())
      throw Error(ErrorCode::kInvalidArgument, "modularity: edge endpoint without a label");
    ++degree[a];
    ++degree[b];
    const auto la = labeling.labels[a];
    if (la != Membership::kBoth && la == labeling.labels[b]) ++same;
  }
  std::uint64_t kx = 0;
  std::uint64_t ky = 0;
  for (std::size_t i = 0; i < degree.size(); ++i) {
    if (labeling.labels[i] == Membership::kXOnly) kx += degree[i];
    else if (labeling.labels[i] == Membership::kYOnly) ky += degree[i];
  }
  // Every endpoint in one pure community: Q and Qmax both vanish.
  if (kx * kx + ky * ky == 4 * m * m) return 0.0;
  const double two_m = 2.0 * static_cast<double>(m);
  const double expected = (static_cast<double>(kx) * static_cast<double>(kx) +
                           static_cast<double>(ky) * static_cast<double>(ky)) / two_m;
  return (2.0 * static_cast<double>(same) - expected) / (two_m - expected);
}

CommunityLabeling label_topic_pair(const CollaborationEventLog& x, const CollaborationEventLog& y) {
  std::unordered_map<std::string, NodeId> ids;
  CommunityLabeling out;
  auto node_for = [&](const std::string& label, Membership side) {
    auto [it, inserted] = ids.try_emplace(label, static_cast<NodeId>(out.labels.size()));
    if (inserted) out.labels.push_back(side);
    else if (out.labels[it->second] != side) out.labels[it->second] = Membership::kBoth;
    return it->second;
  };
  std::set<std::pair<NodeId, NodeId>> edges;
  auto add_log = [&](const CollaborationEventLog& log, Membership side) {
    std::vector<NodeId> local(log.node_count());
    for (std::size_t i = 0; i < log.node_count(); ++i) local[i] = node_for((*log.labels)[i], side);
    for (const auto& ev : log.events) {
      for (std::size_t i = 0; i < ev.authors.size(); ++i) {
        for (std::size_t j = i + 1; j < ev.authors.size(); ++j) {
          NodeId a = local[ev.authors[i]];
          NodeId b = local[ev.authors[j]];
          if (a > b) std::swap(a, b);
          edges.emplace(a, b);
        }
      }
    }
  };
  add_log(x, Membership::kXOnly);
  add_log(y, Membership::kYOnly);
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

}  // namespace coauth
