#include <doctest.h>

#include <map>

#include "coauth/error.hpp"
#include "coauth/rng.hpp"
#include "helpers.hpp"

using namespace coauth;

namespace {

std::vector<TokenizedDoc> random_docs(std::size_t d, std::size_t v, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenizedDoc> docs;
  for (std::size_t i = 0; i < d; ++i) {
    TokenizedDoc doc{"d" + std::to_string(i), {}, {2000, 1}};
    const auto n = rng.below(30);
    for (std::uint64_t j = 0; j < n; ++j) doc.tokens.push_back(static_cast<TermId>(rng.below(v)));
    docs.push_back(doc);
  }
  return docs;
}

Vocabulary numbered_vocab(std::size_t v) {
  std::vector<std::string> terms;
  for (std::size_t i = 0; i < v; ++i) terms.push_back("w" + std::to_string(i));
  return Vocabulary(terms);
}

LdaConfig config(std::size_t k, std::size_t iterations, std::uint64_t seed) {
  auto c = LdaConfig::defaults(k, seed);
  c.iterations = iterations;
  return c;
}

}  // namespace

TEST_CASE("defaults follow the usual symmetric priors") {
  const auto c = LdaConfig::defaults(50, 1);
  CHECK(c.alpha == doctest::Approx(0.1));
  CHECK(c.beta == 0.01);
  CHECK(c.iterations == 1000);
  auto bad = c;
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.alpha = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("k = 1 gives smoothed empirical frequencies") {
  const auto docs = random_docs(40, 12, 4);
  const auto vocab = numbered_vocab(12);
  const auto m = train_lda(docs, vocab, config(1, 20, 9));
  std::vector<double> counts(12, 0.0);
  double n = 0;
  for (const auto& d : docs) {
    for (auto w : d.tokens) {
      counts[w] += 1;
      n += 1;
    }
  }
  for (std::size_t w = 0; w < 12; ++w) {
    CHECK(m.phi(0, w) == doctest::Approx((counts[w] + 0.01) / (n + 12 * 0.01)).epsilon(1e-12));
  }
  for (std::size_t d = 0; d < docs.size(); ++d) CHECK(m.theta(d, 0) == 1.0);
}

TEST_CASE("training is deterministic in the seed") {
  const auto docs = random_docs(50, 30, 8);
  const auto vocab = numbered_vocab(30);
  const auto a = train_lda(docs, vocab, config(4, 30, 77));
  const auto b = train_lda(docs, vocab, config(4, 30, 77));
  const auto c = train_lda(docs, vocab, config(4, 30, 78));
  CHECK(a.phi == b.phi);
  CHECK(a.theta == b.theta);
  CHECK_FALSE(a.phi == c.phi);
}

TEST_CASE("phi and theta rows are distributions") {
  const auto docs = random_docs(50, 30, 12);
  const auto m = train_lda(docs, numbered_vocab(30), config(5, 25, 1));
  for (std::size_t t = 0; t < m.phi.rows(); ++t) {
    double s = 0;
    for (double x : m.phi.row(t)) {
      CHECK(x > 0.0);
      s += x;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (std::size_t d = 0; d < m.theta.rows(); ++d) {
    double s = 0;
    for (double x : m.theta.row(d)) s += x;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(m.theta_doc_ids.size() == docs.size());
}

TEST_CASE("counts are conserved across sweeps") {
  const auto docs = random_docs(30, 20, 15);
  GibbsSampler s(docs, 20, config(6, 1, 3));
  std::size_t total = 0;
  for (const auto& d : docs) total += d.tokens.size();
  for (int sweep = 0; sweep < 10; ++sweep) {
    s.sweep();
    std::size_t sum_topics = 0;
    for (std::size_t t = 0; t < s.topics(); ++t) {
      std::size_t by_term = 0;
      for (TermId w = 0; w < 20; ++w) by_term += s.topic_term_count(t, w);
      CHECK(by_term == s.topic_total(t));
      sum_topics += s.topic_total(t);
    }
    CHECK(sum_topics == total);
    for (std::size_t d = 0; d < docs.size(); ++d) {
      std::size_t by_topic = 0;
      for (std::size_t t = 0; t < s.topics(); ++t) by_topic += s.doc_topic_count(d, t);
      CHECK(by_topic == docs[d].tokens.size());
      CHECK(s.doc_length(d) == docs[d].tokens.size());
    }
  }
}

TEST_CASE("relabeling term ids permutes phi columns") {
  const std::size_t v = 25;
  const auto docs = random_docs(40, v, 33);
  std::vector<TermId> perm(v);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(2);
  for (std::size_t i = v - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  auto relabeled = docs;
  for (auto& d : relabeled) {
    for (auto& w : d.tokens) w = perm[w];
  }
  const auto a = train_lda(docs, numbered_vocab(v), config(3, 40, 5));
  const auto b = train_lda(relabeled, numbered_vocab(v), config(3, 40, 5));
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t w = 0; w < v; ++w) CHECK(b.phi(t, perm[w]) == a.phi(t, w));
  }
  CHECK(a.theta == b.theta);
}

TEST_CASE("empty corpus is rejected and oversize k warns") {
  const auto vocab = numbered_vocab(3);
  CHECK_THROWS_AS(train_lda(std::vector<TokenizedDoc>{}, vocab, config(2, 5, 1)), Error);
  std::vector<TokenizedDoc> tiny{{"a", {0, 1}, {2000, 1}}};
  const auto m = train_lda(tiny, vocab, config(5, 5, 1));
  CHECK_FALSE(m.warnings.empty());
}

TEST_CASE("planted topics are recovered") {
  SynthSpec spec;
  spec.topics = 3;
  spec.docs_per_topic = 120;
  spec.vocab_per_topic = 30;
  const auto synth = generate_synthetic(spec, 19);
  const auto tc = testing::tokenize_documents(synth.documents, 1);
  const auto m = train_lda(tc.docs, tc.vocabulary, config(3, 200, 19));
  const auto planted = testing::planted_over_vocabulary(synth, tc.vocabulary);
  const auto match = testing::best_matching(planted, m.phi);
  CHECK(match.mean_tv <= 0.15);

  const auto held = generate_single_topic_docs(spec, synth, 1, 10, 5);
  TextResources res;
  res.stopwords = {"the"};
  for (const auto& d : held) {
    std::vector<RawTokens> raw{{d.doc_id, d.month, preprocess_document(d, res)}};
    const auto mapped = map_to_vocabulary(tc.vocabulary, raw);
    const auto th = infer_theta(m, mapped[0], 3);
    CHECK(th[match.learned_for_planted[1]] >= 0.8);
  }
}

TEST_CASE("inference edge cases") {
  const auto docs = random_docs(30, 10, 1);
  const auto m = train_lda(docs, numbered_vocab(10), config(4, 20, 1));
  const auto uniform = infer_theta(m, TokenizedDoc{"x", {}, {2000, 1}}, 1);
  for (double x : uniform) CHECK(x == 0.25);
  const auto outside = infer_theta(m, TokenizedDoc{"x", {99, 100}, {2000, 1}}, 1);
  for (double x : outside) CHECK(x == 0.25);

  const TokenizedDoc doc{"x", {1, 2, 3, 3, 4}, {2000, 1}};
  const auto a = infer_theta(m, doc, 42);
  CHECK(a == infer_theta(m, doc, 42));
  CHECK(std::accumulate(a.begin(), a.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));

  const auto single = train_lda(docs, numbered_vocab(10), config(1, 5, 1));
  CHECK(infer_theta(single, doc, 1) == std::vector<double>{1.0});

  InferenceConfig bad;
  bad.window = 300;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("top_words ordering") {
  TopicModel m;
  m.vocabulary = Vocabulary({"zeta", "alpha", "beta"});
  m.phi = Matrix(2, 3);
  m.phi(0, 0) = 0.4;
  m.phi(0, 1) = 0.4;
  m.phi(0, 2) = 0.2;
  m.phi(1, 2) = 1.0;
  const auto w = top_words(m, 0, 2);
  REQUIRE(w.size() == 2);
  CHECK(w[0].term == "alpha");
  CHECK(w[1].term == "zeta");
  CHECK(top_words(m, 1, 10).size() == 3);
  CHECK(top_words(m, 1, 1)[0].probability == 1.0);
  CHECK_THROWS_AS(top_words(m, 2, 1), Error);
}

TEST_CASE("assignment examples") {
  const std::vector<double> row{0.70, 0.20, 0.10};
  CHECK(assign_row(row, AssignmentScheme::threshold(0.6)) == std::vector<std::size_t>{0});
  CHECK(assign_row(row, AssignmentScheme::coverage(0.85)) == std::vector<std::size_t>{0, 1});
  CHECK(assign_row(std::vector<double>{0.4, 0.35, 0.25}, AssignmentScheme::threshold(0.6)).empty());
  CHECK(assign_row(std::vector<double>{0.4, 0.35, 0.25}, AssignmentScheme::coverage(0.5)) ==
        std::vector<std::size_t>{0, 1});
  CHECK(assign_row(std::vector<double>{0.5, 0.5}, AssignmentScheme::coverage(0.5)) == std::vector<std::size_t>{0});
  CHECK(assign_row(std::vector<double>{1.0}, AssignmentScheme::coverage(1.0)) == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(assign_row(row, AssignmentScheme::threshold(1.0)), Error);
  CHECK_THROWS_AS(assign_row(row, AssignmentScheme::threshold(0.0)), Error);
  CHECK_THROWS_AS(assign_row(row, AssignmentScheme::coverage(0.0)), Error);
  CHECK_THROWS_AS(assign_row(std::vector<double>{0.5, 0.4}, AssignmentScheme::coverage(0.5)), Error);
}

TEST_CASE("assignment properties on random rows") {
  Rng rng(101);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t k = 1 + rng.below(12);
    std::vector<double> row(k);
    double s = 0;
    for (auto& x : row) s += (x = -std::log(1.0 - rng.uniform()));
    for (auto& x : row) x /= s;
    const double tau = 0.5 + 0.49 * rng.uniform();
    CHECK(assign_row(row, AssignmentScheme::threshold(tau)).size() <= 1);
    const double c = 0.01 + 0.99 * rng.uniform();
    const auto chosen = assign_row(row, AssignmentScheme::coverage(c));
    REQUIRE_FALSE(chosen.empty());
    double mass = 0, min_chosen = 1;
    for (auto t : chosen) {
      mass += row[t];
      min_chosen = std::min(min_chosen, row[t]);
    }
    CHECK(mass >= c - 1e-12);
    CHECK(mass - min_chosen < c);
  }
}

TEST_CASE("scheme text form") {
  CHECK(AssignmentScheme::parse("threshold:0.6") == AssignmentScheme::threshold(0.6));
  CHECK(AssignmentScheme::parse("coverage:0.5").str() == "coverage:0.5");
  CHECK_THROWS_AS(AssignmentScheme::parse("top:3"), Error);
  CHECK_THROWS_AS(AssignmentScheme::parse("threshold:1.5"), Error);
}

TEST_CASE("model and assignment files round-trip") {
  const auto docs = random_docs(20, 15, 6);
  const auto m = train_lda(docs, numbered_vocab(15), config(3, 10, 6));
  const auto back = parse_model(serialize_model(m, true));
  CHECK(back.phi == m.phi);
  CHECK(back.theta == m.theta);
  CHECK(back.theta_doc_ids == m.theta_doc_ids);
  CHECK(back.vocabulary.terms() == m.vocabulary.terms());
  CHECK(back.config.seed == m.config.seed);
  CHECK(back.config.alpha == m.config.alpha);
  const auto no_theta = parse_model(serialize_model(m, false));
  CHECK(no_theta.theta.rows() == 0);
  CHECK_THROWS_AS(parse_model("coauth-lda-model 9\n"), Error);

  const auto assignments = assign_articles(m.theta, m.theta_doc_ids, AssignmentScheme::coverage(0.7));
  CHECK(parse_assignments(serialize_assignments(assignments)) == assignments);
}
