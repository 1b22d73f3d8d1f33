#include "coauth/topics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "coauth/error.hpp"
#include "coauth/io.hpp"

namespace coauth {

LdaConfig LdaConfig::defaults(std::size_t k, std::uint64_t seed) {
  LdaConfig c;
  c.k = k;
  c.alpha = 5.0 / static_cast<double>(k);
  c.beta = 0.01;
  c.iterations = 1000;
  c.seed = seed;
  return c;
}

void LdaConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::kConfig, "lda: k must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::kConfig, "lda: alpha must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::kConfig, "lda: beta must be > 0");
  if (iterations < 1) throw Error(ErrorCode::kConfig, "lda: iterations must be >= 1");
}

GibbsSampler::GibbsSampler(std::span<const TokenizedDoc> docs, std::size_t vocab_size,
                           const LdaConfig& config)
    : k_(config.k),
      v_(vocab_size),
      alpha_(config.alpha),
      beta_(config.beta),
      rng_(config.seed),
      term_topic_(vocab_size * config.k, 0),
      doc_topic_(docs.size() * config.k, 0),
      topic_total_(config.k, 0),
      cumulative_(config.k, 0.0) {
  config.validate();
  doc_offset_.reserve(docs.size() + 1);
  doc_offset_.push_back(0);
  for (const auto& doc : docs) {
    for (TermId w : doc.tokens) {
      if (w >= v_) throw Error(ErrorCode::kInvalidArgument, "token id out of vocabulary in '" + doc.doc_id + "'");
      words_.push_back(w);
    }
    doc_offset_.push_back(words_.size());
  }
  if (words_.empty()) throw Error(ErrorCode::kInvalidArgument, "lda: corpus has no tokens");

  assignments_.resize(words_.size());
  for (std::size_t d = 0; d + 1 < doc_offset_.size(); ++d) {
    for (std::size_t i = doc_offset_[d]; i < doc_offset_[d + 1]; ++i) {
      const auto t = static_cast<std::uint32_t>(rng_.below(k_));
      assignments_[i] = t;
      ++term_topic_[words_[i] * k_ + t];
      ++doc_topic_[d * k_ + t];
      ++topic_total_[t];
    }
  }
}

void GibbsSampler::sweep() {
  const double v_beta = static_cast<double>(v_) * beta_;
  for (std::size_t d = 0; d + 1 < doc_offset_.size(); ++d) {
    std::uint32_t* dt = &doc_topic_[d * k_];
    for (std::size_t i = doc_offset_[d]; i < doc_offset_[d + 1]; ++i) {
      const TermId w = words_[i];
      std::uint32_t* wt = &term_topic_[w * k_];
      std::uint32_t t = assignments_[i];
      --wt[t];
      --dt[t];
      --topic_total_[t];

      double cum = 0.0;
      for (std::size_t j = 0; j < k_; ++j) {
        cum += (dt[j] + alpha_) * (wt[j] + beta_) / (topic_total_[j] + v_beta);
        cumulative_[j] = cum;
      }
      const double u = rng_.uniform() * cum;
      t = static_cast<std::uint32_t>(k_ - 1);
      for (std::size_t j = 0; j < k_; ++j) {
        if (u < cumulative_[j]) {
          t = static_cast<std::uint32_t>(j);
          break;
        }
      }

      assignments_[i] = t;
      ++wt[t];
      ++dt[t];
      ++topic_total_[t];
    }
  }
}

Matrix GibbsSampler::phi() const {
  Matrix phi(k_, v_);
  const double v_beta = static_cast<double>(v_) * beta_;
  for (std::size_t t = 0; t < k_; ++t) {
    const double denom = topic_total_[t] + v_beta;
    for (std::size_t w = 0; w < v_; ++w) phi(t, w) = (term_topic_[w * k_ + t] + beta_) / denom;
  }
  return phi;
}

Matrix GibbsSampler::theta() const {
  const std::size_t n_docs = documents();
  Matrix theta(n_docs, k_);
  const double k_alpha = static_cast<double>(k_) * alpha_;
  for (std::size_t d = 0; d < n_docs; ++d) {
    const double denom = static_cast<double>(doc_length(d)) + k_alpha;
    for (std::size_t t = 0; t < k_; ++t) theta(d, t) = (doc_topic_[d * k_ + t] + alpha_) / denom;
  }
  return theta;
}

TopicModel train_lda(std::span<const TokenizedDoc> docs, const Vocabulary& vocabulary,
                     const LdaConfig& config) {
  config.validate();
  if (docs.empty()) throw Error(ErrorCode::kInvalidArgument, "lda: empty corpus");
  if (vocabulary.size() == 0) throw Error(ErrorCode::kInvalidArgument, "lda: empty vocabulary");

  GibbsSampler sampler(docs, vocabulary.size(), config);
  TopicModel model;
  if (config.k > sampler.total_tokens()) {
    model.warnings.push_back("k=" + std::to_string(config.k) + " exceeds total token count " +
                             std::to_string(sampler.total_tokens()));
  }
  for (std::size_t it = 0; it < config.iterations; ++it) sampler.sweep();

  model.config = config;
  model.vocabulary = vocabulary;
  model.phi = sampler.phi();
  model.theta = sampler.theta();
  model.theta_doc_ids.reserve(docs.size());
  for (const auto& d : docs) model.theta_doc_ids.push_back(d.doc_id);
  return model;
}

void InferenceConfig::validate() const {
  if (sweeps < 1) throw Error(ErrorCode::kConfig, "inference: sweeps must be >= 1");
  if (window < 1 || window > sweeps)
    throw Error(ErrorCode::kConfig, "inference: window must be in [1, sweeps]");
}

std::vector<double> infer_theta(const TopicModel& model, const TokenizedDoc& doc,
                                std::uint64_t seed, const InferenceConfig& config) {
  config.validate();
  const std::size_t k = model.k();
  const std::size_t v = model.phi.cols();
  const double alpha = model.config.alpha;

  std::vector<TermId> words;
  words.reserve(doc.tokens.size());
  for (TermId w : doc.tokens) {
    if (w < v) words.push_back(w);
  }
  if (words.empty()) return std::vector<double>(k, 1.0 / static_cast<double>(k));

  Rng rng(seed);
  std::vector<std::uint32_t> z(words.size());
  std::vector<std::uint32_t> counts(k, 0);
  for (auto& t : z) {
    t = static_cast<std::uint32_t>(rng.below(k));
    ++counts[t];
  }

  std::vector<double> cumulative(k);
  std::vector<double> sum(k, 0.0);
  const double denom = static_cast<double>(words.size()) + static_cast<double>(k) * alpha;
  for (std::size_t s = 0; s < config.sweeps; ++s) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --counts[z[i]];
      double cum = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        cum += (counts[t] + alpha) * model.phi(t, words[i]);
        cumulative[t] = cum;
      }
      const double u = rng.uniform() * cum;
      std::uint32_t pick = static_cast<std::uint32_t>(k - 1);
      for (std::size_t t = 0; t < k; ++t) {
        if (u < cumulative[t]) {
          pick = static_cast<std::uint32_t>(t);
          break;
        }
      }
      z[i] = pick;
      ++counts[pick];
    }
    if (s >= config.sweeps - config.window) {
      for (std::size_t t = 0; t < k; ++t) sum[t] += (counts[t] + alpha) / denom;
    }
  }
  for (auto& x : sum) x /= static_cast<double>(config.window);
  return sum;
}

std::vector<RankedTerm> top_words(const TopicModel& model, std::size_t topic, std::size_t n) {
  if (topic >= model.k())
    throw Error(ErrorCode::kInvalidArgument, "topic " + std::to_string(topic) + " out of range (k=" +
                                                 std::to_string(model.k()) + ")");
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "top_words: n must be >= 1");
  const auto row = model.phi.row(topic);
  const auto& terms = model.vocabulary.terms();
  std::vector<TermId> order(row.size());
  std::iota(order.begin(), order.end(), TermId{0});
  const std::size_t take = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](TermId a, TermId b) {
                      if (row[a] != row[b]) return row[a] > row[b];
                      return terms[a] < terms[b];
                    });
  std::vector<RankedTerm> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({terms[order[i]], row[order[i]]});
  return out;
}

void AssignmentScheme::validate() const {
  if (kind == Kind::kThreshold) {
    if (!(value > 0.0 && value < 1.0))
      throw Error(ErrorCode::kConfig, "threshold must lie in (0,1), got " + format_double(value));
  } else if (!(value > 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::kConfig, "coverage must lie in (0,1], got " + format_double(value));
  }
}

std::string AssignmentScheme::str() const {
  return std::string(kind == Kind::kThreshold ? "threshold:" : "coverage:") + format_double(value);
}

AssignmentScheme AssignmentScheme::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw Error(ErrorCode::kConfig, "scheme must be threshold:<tau> or coverage:<c>");
  const auto name = text.substr(0, colon);
  const double v = parse_double(text.substr(colon + 1), "scheme value");
  AssignmentScheme s;
  if (name == "threshold") s = threshold(v);
  else if (name == "coverage") s = coverage(v);
  else throw Error(ErrorCode::kConfig, "unknown scheme '" + std::string(name) + "'");
  s.validate();
  return s;
}

std::vector<std::size_t> assign_row(std::span<const double> theta_row, const AssignmentScheme& scheme) {
  scheme.validate();
  const double total = std::accumulate(theta_row.begin(), theta_row.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-6)
    throw Error(ErrorCode::kInvalidArgument, "assign: theta row sums to " + format_double(total));
  std::vector<std::size_t> out;
  if (scheme.kind == AssignmentScheme::Kind::kThreshold) {
    for (std::size_t t = 0; t < theta_row.size(); ++t) {
      if (theta_row[t] > scheme.value) out.push_back(t);
    }
    return out;
  }
  std::vector<std::size_t> order(theta_row.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return theta_row[a] > theta_row[b]; });
  double mass = 0.0;
  for (std::size_t t : order) {
    out.push_back(t);
    mass += theta_row[t];
    if (mass >= scheme.value) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TopicAssignment> assign_articles(const Matrix& thetas, std::span<const std::string> doc_ids,
                                             const AssignmentScheme& scheme) {
  scheme.validate();
  if (doc_ids.size() != thetas.rows())
    throw Error(ErrorCode::kInvalidArgument, "assign: doc id count does not match theta rows");
  std::vector<TopicAssignment> out;
  out.reserve(thetas.rows());
  for (std::size_t d = 0; d < thetas.rows(); ++d) {
    const auto row = thetas.row(d);
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-6)
      throw Error(ErrorCode::kInvalidArgument,
                  "assign: theta row for '" + doc_ids[d] + "' sums to " + format_double(total));
    out.push_back({doc_ids[d], assign_row(row, scheme), scheme});
  }
  return out;
}

namespace {

constexpr std::string_view kModelMagic = "coauth-lda-model 1";

void append_row(std::string& out, std::span<const double> row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ' ';
    out += format_double(row[i]);
  }
  out += '\n';
}

std::vector<double> parse_row(std::string_view line, std::size_t expected, std::string_view what) {
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& tok : split(line, ' ')) out.push_back(parse_double(tok, what));
  if (out.size() != expected)
    throw Error(ErrorCode::kParse, "model: " + std::string(what) + " row has " +
                                       std::to_string(out.size()) + " values, expected " +
                                       std::to_string(expected));
  return out;
}

}  // namespace

std::string serialize_model(const TopicModel& model, bool include_theta) {
  std::string out;
  out += kModelMagic;
  out += '\n';
  out += "k " + std::to_string(model.config.k) + '\n';
  out += "alpha " + format_double(model.config.alpha) + '\n';
  out += "beta " + format_double(model.config.beta) + '\n';
  out += "iterations " + std::to_string(model.config.iterations) + '\n';
  out += "seed " + std::to_string(model.config.seed) + '\n';
  out += "min_count " + std::to_string(model.vocabulary.min_count()) + '\n';
  out += "vocabulary " + std::to_string(model.vocabulary.size()) + ' ' + model.vocabulary.digest() + '\n';
  for (const auto& t : model.vocabulary.terms()) {
    out += t;
    out += '\n';
  }
  out += "phi\n";
  for (std::size_t t = 0; t < model.phi.rows(); ++t) append_row(out, model.phi.row(t));
  const std::size_t n_theta = include_theta ? model.theta.rows() : 0;
  out += "theta " + std::to_string(n_theta) + '\n';
  for (std::size_t d = 0; d < n_theta; ++d) {
    out += model.theta_doc_ids.at(d);
    out += '\t';
    append_row(out, model.theta.row(d));
  }
  return out;
}

TopicModel parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kParse, "model: " + what); };
  auto next = [&]() -> std::string& {
    if (!std::getline(in, line)) fail("truncated file");
    return line;
  };
  auto keyed = [&](std::string_view key) -> std::vector<std::string> {
    auto parts = split(next(), ' ');
    if (parts.empty() || parts[0] != key) fail("expected '" + std::string(key) + "'");
    return parts;
  };
  auto single = [&](std::string_view key) -> std::string {
    auto parts = keyed(key);
    if (parts.size() != 2) fail("malformed '" + std::string(key) + "' line");
    return parts[1];
  };

  if (next() != kModelMagic) fail("bad header");
  TopicModel model;
  model.config.k = static_cast<std::size_t>(parse_int(single("k"), "k"));
  model.config.alpha = parse_double(single("alpha"), "alpha");
  model.config.beta = parse_double(single("beta"), "beta");
  model.config.iterations = static_cast<std::size_t>(parse_int(single("iterations"), "iterations"));
  model.config.seed = std::stoull(single("seed"));
  model.config.validate();
  const auto min_count = static_cast<std::size_t>(parse_int(single("min_count"), "min_count"));
  const auto vocab_line = keyed("vocabulary");
  if (vocab_line.size() != 3) fail("malformed 'vocabulary' line");
  const auto v = static_cast<std::size_t>(parse_int(vocab_line[1], "vocabulary size"));
  std::vector<std::string> terms;
  terms.reserve(v);
  for (std::size_t i = 0; i < v; ++i) terms.push_back(next());
  model.vocabulary = Vocabulary(std::move(terms), min_count);
  if (model.vocabulary.digest() != vocab_line[2]) fail("vocabulary digest mismatch");

  if (next() != "phi") fail("expected 'phi'");
  model.phi = Matrix(model.config.k, v);
  for (std::size_t t = 0; t < model.config.k; ++t) {
    const auto row = parse_row(next(), v, "phi");
    std::copy(row.begin(), row.end(), model.phi.row(t).begin());
  }
  const auto n_theta = static_cast<std::size_t>(parse_int(single("theta"), "theta"));
  model.theta = Matrix(n_theta, model.config.k);
  for (std::size_t d = 0; d < n_theta; ++d) {
    const auto& l = next();
    const auto tab = l.find('\t');
    if (tab == std::string::npos) fail("theta line without doc id");
    model.theta_doc_ids.push_back(l.substr(0, tab));
    const auto row = parse_row(std::string_view(l).substr(tab + 1), model.config.k, "theta");
    std::copy(row.begin(), row.end(), model.theta.row(d).begin());
  }
  return model;
}

std::string serialize_top_words(const TopicModel& model, std::size_t n) {
  std::string out = "topic\trank\tterm\tprobability\n";
  for (std::size_t t = 0; t < model.k(); ++t) {
    const auto words = top_words(model, t, n);
    for (std::size_t r = 0; r < words.size(); ++r) {
      out += std::to_string(t) + '\t' + std::to_string(r + 1) + '\t' + words[r].term + '\t' +
             format_double(words[r].probability) + '\n';
    }
  }
  return out;
}

std::string serialize_assignments(std::span<const TopicAssignment> assignments) {
  std::string out = "doc_id\ttopics\tscheme\n";
  for (const auto& a : assignments) {
    out += a.doc_id;
    out += '\t';
    if (a.topics.empty()) {
      out += '-';
    } else {
      for (std::size_t i = 0; i < a.topics.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(a.topics[i]);
      }
    }
    out += '\t';
    out += a.scheme.str();
    out += '\n';
  }
  return out;
}

std::vector<TopicAssignment> parse_assignments(std::string_view text) {
  std::vector<TopicAssignment> out;
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0] != "doc_id\ttopics\tscheme")
    throw Error(ErrorCode::kParse, "assignments: bad header");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cols = split(lines[i], '\t');
    if (cols.size() != 3)
      throw Error(ErrorCode::kParse, "assignments: line " + std::to_string(i + 1) + " needs 3 columns");
    TopicAssignment a;
    a.doc_id = cols[0];
    if (cols[1] != "-") {
      for (const auto& t : split(cols[1], ','))
        a.topics.push_back(static_cast<std::size_t>(parse_int(t, "topic id")));
    }
    a.scheme = AssignmentScheme::parse(cols[2]);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace coauth
