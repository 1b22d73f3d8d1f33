#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "coauth/error.hpp"
#include "coauth/metrics.hpp"
#include "coauth/rng.hpp"
#include "coauth/synth.hpp"

using namespace coauth;

namespace {

GraphSnapshot graph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> pairs) {
  GraphSnapshot g;
  g.n_nodes = n;
  auto labels = std::make_shared<std::vector<std::string>>();
  for (std::size_t i = 0; i < n; ++i) labels->push_back("n" + std::string(1, static_cast<char>('a' + i % 26)) + std::to_string(i));
  g.labels = labels;
  for (auto [u, v] : pairs) g.edges.push_back({std::min(u, v), std::max(u, v), 0, 1});
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return g;
}

GraphSnapshot complete(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) e.push_back({i, j});
  }
  return graph(n, e);
}

GraphSnapshot random_graph(Rng& rng, std::size_t n, double p) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (rng.uniform() < p) e.push_back({i, j});
    }
  }
  return graph(n, e);
}

constexpr int kInf = std::numeric_limits<int>::max() / 4;

std::vector<std::vector<int>> all_pairs(const GraphSnapshot& g) {
  const auto n = g.n_nodes;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : g.edges) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  return d;
}

/// Largest reachability class by the closure oracle; ties to the class whose
/// smallest label sorts first.
std::vector<std::size_t> oracle_gcc(const GraphSnapshot& g, const std::vector<std::vector<int>>& d) {
  std::vector<std::size_t> best;
  std::string best_label;
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    std::vector<std::size_t> cls;
    for (std::size_t j = 0; j < g.n_nodes; ++j) {
      if (d[i][j] < kInf) cls.push_back(j);
    }
    std::string label = (*g.labels)[cls[0]];
    for (auto j : cls) label = std::min(label, (*g.labels)[j]);
    if (cls.size() > best.size() || (cls.size() == best.size() && label < best_label)) {
      best = cls;
      best_label = label;
    }
  }
  return best;
}

double oracle_modularity(const CommunityLabeling& l) {
  const auto n = l.labels.size();
  std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
  std::vector<double> k(n, 0);
  for (auto [u, v] : l.edges) {
    a[u][v] = a[v][u] = 1;
    k[u] += 1;
    k[v] += 1;
  }
  const double two_m = 2.0 * static_cast<double>(l.edges.size());
  double num = 0, expected = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool same = l.labels[i] != Membership::kBoth && l.labels[i] == l.labels[j];
      if (!same) continue;
      num += a[i][j] - k[i] * k[j] / two_m;
      expected += k[i] * k[j] / two_m;
    }
  }
  return num / (two_m - expected);
}

MetricCurve curve(std::vector<double> gcc, std::vector<double> mpl) {
  MetricCurve c;
  c.origin = {2000, 1};
  for (std::size_t i = 0; i < gcc.size(); ++i) {
    MetricPoint p;
    p.month_index = static_cast<int>(i);
    p.n_nodes = 10 * (i + 1);
    p.gcc_fraction = gcc[i];
    p.gcc_nodes = static_cast<std::size_t>(gcc[i] * static_cast<double>(p.n_nodes));
    p.mean_path_length = mpl[i];
    p.path_mode = PathMode::exact();
    c.points.push_back(p);
  }
  return c;
}

std::vector<Document> synthetic_docs(double mixing, std::size_t docs, std::uint64_t seed) {
  SynthSpec spec;
  spec.topics = 1;
  spec.docs_per_topic = docs;
  spec.months = 60;
  spec.mixing = {mixing};
  return generate_synthetic(spec, seed).documents;
}

}  // namespace

TEST_CASE("components of a triangle and an isolate") {
  const auto p = connected_components(graph(4, {{0, 1}, {1, 2}, {0, 2}}));
  REQUIRE(p.components.size() == 2);
  CHECK(p.components[0] == std::vector<NodeId>{0, 1, 2});
  CHECK(p.components[1] == std::vector<NodeId>{3});
  CHECK(p.component_of == std::vector<std::size_t>{0, 0, 0, 1});
  CHECK(connected_components(graph(0, {})).components.empty());
}

TEST_CASE("gcc fraction examples") {
  CHECK(gcc_fraction(complete(7)) == 1.0);
  CHECK(gcc_fraction(graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}})) == 0.5);
  CHECK(gcc_fraction(graph(10, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}})) == 0.3);
  CHECK_THROWS_AS(gcc_fraction(graph(0, {})), Error);
}

TEST_CASE("mean path length examples") {
  CHECK(*mean_path_length(complete(4), PathMode::exact(), 0).value == 1.0);
  CHECK(*mean_path_length(graph(4, {{0, 1}, {1, 2}, {2, 3}}), PathMode::exact(), 0).value ==
        doctest::Approx(10.0 / 6.0).epsilon(1e-15));
  CHECK(*mean_path_length(graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}), PathMode::exact(), 0).value ==
        doctest::Approx(1.6).epsilon(1e-15));
  CHECK_FALSE(mean_path_length(graph(3, {}), PathMode::exact(), 0).value);
  CHECK_FALSE(mean_path_length(graph(0, {}), PathConfig{}).value);
}

TEST_CASE("path mode follows the GCC size") {
  Rng rng(1);
  const auto g = random_graph(rng, 60, 0.1);
  PathConfig cfg;
  cfg.exact_limit = 10;
  cfg.sources = 5;
  const auto sampled = mean_path_length(g, cfg);
  CHECK(sampled.mode == PathMode::sampled(5));
  cfg.exact_limit = 2000;
  CHECK(mean_path_length(g, cfg).mode == PathMode::exact());
  CHECK(PathMode::sampled(5).str() == "sampled:5");
}

TEST_CASE("partition, gcc and path length agree with brute-force oracles") {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    const auto g = random_graph(rng, n, 2.5 / static_cast<double>(n));
    const auto d = all_pairs(g);
    const auto p = connected_components(g);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) CHECK((p.component_of[i] == p.component_of[j]) == (d[i][j] < kInf));
    }
    const auto gcc = oracle_gcc(g, d);
    const auto& largest = p.components[largest_component(p)];
    CHECK(std::vector<std::size_t>(largest.begin(), largest.end()) == gcc);
    CHECK(gcc_fraction(g) == static_cast<double>(gcc.size()) / static_cast<double>(n));

    const auto exact = mean_path_length(g, PathMode::exact(), 0);
    if (gcc.size() < 2) {
      CHECK_FALSE(exact.value);
      continue;
    }
    double sum = 0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < gcc.size(); ++a) {
      for (std::size_t b = a + 1; b < gcc.size(); ++b) {
        sum += d[gcc[a]][gcc[b]];
        ++pairs;
      }
    }
    REQUIRE(exact.value);
    CHECK(std::abs(*exact.value - sum / static_cast<double>(pairs)) <= 1e-12);
    const auto all_sources = mean_path_length(g, PathMode::sampled(gcc.size()), 12345);
    CHECK(*all_sources.value == *exact.value);
    const auto some = mean_path_length(g, PathMode::sampled(3), 7);
    CHECK(*some.value == *mean_path_length(g, PathMode::sampled(3), 7).value);
    CHECK(*some.value >= 1.0);
  }
}

TEST_CASE("measure_series on a single event") {
  CollaborationEventLog log;
  log.origin = {2000, 1};
  log.labels = std::make_shared<std::vector<std::string>>(std::vector<std::string>{"a", "b", "c"});
  log.first_seen = {0, 0, 0};
  log.events.push_back({0, {0, 1, 2}, "d"});
  const auto c = measure_series(assemble_series(log, EdgePolicy::unlimited()), PathConfig{});
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0].n_nodes == 3);
  CHECK(c.points[0].n_edges == 3);
  CHECK(c.points[0].gcc_fraction == 1.0);
  CHECK(*c.points[0].mean_path_length == 1.0);
}

TEST_CASE("unlimited curves never lose GCC nodes and round-trip through CSV") {
  const auto docs = synthetic_docs(0.6, 200, 4);
  std::vector<const Document*> ptrs;
  for (const auto& d : docs) ptrs.push_back(&d);
  EventOptions opts;
  opts.origin = {2000, 1};
  const auto c = measure_series(assemble_series(build_events(ptrs, opts), EdgePolicy::unlimited()), PathConfig{});
  for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].gcc_nodes >= c.points[i - 1].gcc_nodes);
  const auto back = parse_curve(serialize_curve(c));
  REQUIRE(back.points.size() == c.points.size());
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    CHECK(back.points[i].gcc_fraction == c.points[i].gcc_fraction);
    CHECK(back.points[i].mean_path_length == c.points[i].mean_path_length);
    CHECK(back.points[i].path_mode == c.points[i].path_mode);
    CHECK(back.points[i].n_nodes == c.points[i].n_nodes);
  }
}

TEST_CASE("smoothing truncates at the ends") {
  const std::vector<double> v{1, 2, 3, 4, 5};
  CHECK(smooth(v, 1) == v);
  const auto s = smooth(v, 3);
  CHECK(s[0] == 1.5);
  CHECK(s[2] == 3.0);
  CHECK(s[4] == 4.5);
}

TEST_CASE("classifier examples") {
  const auto dense = classify_assembly(curve({0.2, 0.5, 0.7}, {1, 8, 5}));
  CHECK(dense.assembly_class == AssemblyClass::kDenseGC);
  CHECK(dense.diagnostics.peak_index == 1u);
  CHECK(dense.diagnostics.decline_ratio == doctest::Approx(3.0 / 8.0));

  const auto tree = classify_assembly(curve({0.1, 0.2, 0.3, 0.4}, {1, 2, 3, 4}));
  CHECK(tree.assembly_class == AssemblyClass::kTreelikeGC);
  CHECK_FALSE(tree.diagnostics.peak_index);

  CHECK(classify_assembly(curve({0.01, 0.03, 0.05}, {1, 1.5, 1.2})).assembly_class == AssemblyClass::kNoGC);
  CHECK(classify_assembly(curve({0.2, 0.5, 0.2}, {1, 8, 5})).assembly_class == AssemblyClass::kTreelikeGC);
  CHECK(classify_assembly(curve({0.2, 0.5, 0.7}, {1, 8, 7.9})).assembly_class == AssemblyClass::kTreelikeGC);
}

TEST_CASE("short curves are unclassifiable") {
  try {
    classify_assembly(curve({0.5, 0.7}, {1, 2}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDomain);
    CHECK(std::string(e.what()).find("unclassifiable") != std::string::npos);
  }
}

TEST_CASE("classification ignores x-axis scaling") {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng.below(40);
    std::vector<double> gcc(n), mpl(n);
    for (std::size_t i = 0; i < n; ++i) {
      gcc[i] = rng.uniform();
      mpl[i] = 1 + 10 * rng.uniform();
    }
    auto c = curve(gcc, mpl);
    const auto a = classify_assembly(c);
    const auto scale = 1 + rng.below(9);
    for (auto& p : c.points) {
      p.n_nodes *= scale;
      p.month_index = p.month_index * static_cast<int>(scale) + 17;
    }
    const auto b = classify_assembly(c);
    CHECK(a.assembly_class == b.assembly_class);
    CHECK(a.diagnostics.decline_ratio == b.diagnostics.decline_ratio);
    CHECK(a.diagnostics.peak_index == b.diagnostics.peak_index);
  }
}

TEST_CASE("size bins are geometric") {
  CHECK(size_bin(1) == 0);
  CHECK(size_bin(10) == 20);
  CHECK(size_bin(100) == 40);
  CHECK(size_bin(9) == 19);
  for (std::size_t n = 1; n < 5000; n += 7) {
    const int b = size_bin(n);
    CHECK(size_bin_edge(b) <= static_cast<double>(n) + 1e-9);
    CHECK(static_cast<double>(n) < size_bin_edge(b + 1));
  }
}

TEST_CASE("null model is deterministic and independent of threading") {
  const auto docs = synthetic_docs(0.5, 150, 6);
  NullModelConfig cfg;
  cfg.n_articles = 60;
  cfg.n_instances = 6;
  cfg.policy = EdgePolicy::months(24);
  cfg.seed = 31;
  cfg.events.origin = {2000, 1};
  const auto a = null_model(docs, cfg);
  const auto b = null_model(docs, cfg);
  cfg.threads = 3;
  const auto c = null_model(docs, cfg);
  for (const auto* band : {&b, &c}) {
    REQUIRE(band->bins.size() == a.bins.size());
    for (std::size_t i = 0; i < a.bins.size(); ++i) {
      CHECK(band->bins[i].mean_gcc_fraction == a.bins[i].mean_gcc_fraction);
      CHECK(band->bins[i].std_gcc_fraction == a.bins[i].std_gcc_fraction);
      CHECK(band->bins[i].mean_mpl == a.bins[i].mean_mpl);
    }
  }
  for (const auto& bin : a.bins) {
    CHECK(bin.std_gcc_fraction >= 0.0);
    if (bin.std_mpl) CHECK(*bin.std_mpl >= 0.0);
  }
  CHECK(serialize_null_band(parse_null_band(serialize_null_band(a))) == serialize_null_band(a));

  cfg.n_articles = docs.size() + 1;
  CHECK_THROWS_AS(null_model(docs, cfg), Error);
  cfg.n_articles = 10;
  cfg.n_instances = 0;
  CHECK_THROWS_AS(null_model(docs, cfg), Error);
}

TEST_CASE("null aggregation does not depend on instance order") {
  Rng rng(4);
  std::vector<MetricCurve> curves;
  for (int i = 0; i < 7; ++i) {
    std::vector<double> gcc, mpl;
    for (int j = 0; j < 12; ++j) {
      gcc.push_back(rng.uniform());
      mpl.push_back(1 + rng.uniform());
    }
    curves.push_back(curve(gcc, mpl));
  }
  const auto a = aggregate_null(curves);
  std::reverse(curves.begin(), curves.end());
  const auto b = aggregate_null(curves);
  REQUIRE(a.bins.size() == b.bins.size());
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    CHECK(a.bins[i].mean_gcc_fraction == doctest::Approx(b.bins[i].mean_gcc_fraction).epsilon(1e-12));
    CHECK(a.bins[i].std_gcc_fraction == doctest::Approx(b.bins[i].std_gcc_fraction).epsilon(1e-12));
    CHECK(a.bins[i].instances == b.bins[i].instances);
  }
  CHECK(a.bin_for(35) != nullptr);
  CHECK(a.bin_for(100000) == &a.bins.back());
}

TEST_CASE("modularity cases") {
  using M = Membership;
  CommunityLabeling two{{M::kXOnly, M::kXOnly, M::kXOnly, M::kYOnly, M::kYOnly, M::kYOnly},
                        {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}};
  CHECK(pairwise_modularity(two) == 1.0);

  CommunityLabeling single{{M::kXOnly, M::kXOnly, M::kXOnly}, {{0, 1}, {1, 2}}};
  CHECK(pairwise_modularity(single) == 0.0);

  CommunityLabeling both{{M::kXOnly, M::kBoth}, {{0, 1}}};
  CommunityLabeling unlike{{M::kXOnly, M::kYOnly}, {{0, 1}}};
  CHECK(pairwise_modularity(both) == doctest::Approx(-1.0 / 3.0));
  CommunityLabeling both_both{{M::kBoth, M::kBoth, M::kXOnly}, {{0, 1}, {1, 2}}};
  CHECK(pairwise_modularity(both_both) == doctest::Approx(oracle_modularity(both_both)).epsilon(1e-12));
  CHECK(pairwise_modularity(unlike) == -1.0);

  CHECK_THROWS_AS(pairwise_modularity(CommunityLabeling{{M::kXOnly}, {}}), Error);
}

TEST_CASE("modularity matches direct summation and is symmetric") {
  Rng rng(15);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(25);
    CommunityLabeling l;
    for (std::size_t i = 0; i < n; ++i) l.labels.push_back(static_cast<Membership>(rng.below(3)));
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        if (rng.uniform() < 0.25) l.edges.push_back({i, j});
      }
    }
    if (l.edges.empty()) continue;
    const double q = pairwise_modularity(l);
    const double oracle = oracle_modularity(l);
    if (std::isfinite(oracle) && std::abs(oracle) <= 1.0 + 1e-9) {
      CHECK(std::abs(q - oracle) <= 1e-12);
      ++checked;
    }
    CHECK(q >= -1.0 - 1e-12);
    CHECK(q <= 1.0 + 1e-12);
    auto swapped = l;
    for (auto& m : swapped.labels) {
      if (m == Membership::kXOnly) m = Membership::kYOnly;
      else if (m == Membership::kYOnly) m = Membership::kXOnly;
    }
    CHECK(pairwise_modularity(swapped) == q);
  }
  CHECK(checked > 200);
}

TEST_CASE("label_topic_pair marks shared authors") {
  auto make = [](std::vector<std::string> labels, std::vector<std::vector<NodeId>> events) {
    CollaborationEventLog log;
    log.labels = std::make_shared<std::vector<std::string>>(labels);
    log.first_seen.assign(labels.size(), 0);
    for (auto& e : events) log.events.push_back({0, e, "d"});
    return log;
  };
  const auto x = make({"a", "b", "c"}, {{0, 1}, {1, 2}});
  const auto y = make({"c", "d"}, {{0, 1}});
  const auto l = label_topic_pair(x, y);
  REQUIRE(l.labels.size() == 4);
  std::size_t both = 0;
  for (auto m : l.labels) both += m == Membership::kBoth;
  CHECK(both == 1);
  CHECK(l.edges.size() == 3);
}
