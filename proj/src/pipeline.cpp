#include "coauth/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <future>
#include <map>
#include <set>
#include <unordered_map>

#include "coauth/error.hpp"
#include "coauth/io.hpp"

namespace coauth {

namespace builtin {
extern const std::string_view kStopwords;
extern const std::string_view kLemmas;
}  // namespace builtin

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

namespace {

const std::vector<std::pair<std::string, std::string>> kDefaults = {
    {"corpus", ""},
    {"out", "out"},
    {"seed", ""},
    {"stopwords", "builtin"},
    {"custom_stopwords", ""},
    {"lexicon", "builtin"},
    {"strict", "false"},
    {"window.begin", ""},
    {"window.end", ""},
    {"origin", ""},
    {"convention", "full"},
    {"min_count", "5"},
    {"lda.k", "50"},
    {"lda.alpha", ""},
    {"lda.beta", "0.01"},
    {"lda.iterations", "1000"},
    {"infer.sweeps", "200"},
    {"infer.window", "100"},
    {"topwords.n", "20"},
    {"scheme", "threshold:0.6"},
    {"topics", "all"},
    {"lifetimes", "unlimited,24,60,120"},
    {"max_authors", "0"},
    {"path.exact_limit", "2000"},
    {"path.sources", "1000"},
    {"classify.f_dense", "0.25"},
    {"classify.f_tree", "0.1"},
    {"classify.decline", "0.1"},
    {"classify.window", "5"},
    {"null.instances", "100"},
    {"null.articles", "0"},
    {"null.lifetimes", "unlimited"},
    {"threads", "1"},
    {"apply.model", ""},
    {"apply.corpus", ""},
    {"apply.tokens", ""},
};

std::size_t as_count(const std::string& value, const std::string& key) {
  const auto v = parse_int(value, key);
  if (v < 0) throw Error(ErrorCode::kConfig, key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

bool as_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::kConfig, key + " must be true or false");
}

std::optional<YearMonth> as_month(const std::string& value, const std::string& key) {
  if (value.empty()) return std::nullopt;
  const auto ym = YearMonth::parse(value);
  if (!ym) throw Error(ErrorCode::kConfig, key + " must be YYYY-MM");
  return ym;
}

std::vector<EdgePolicy> as_policies(const std::string& value, const std::string& key) {
  std::vector<EdgePolicy> out;
  for (const auto& part : split(value, ',')) {
    if (trim(part).empty()) continue;
    auto p = EdgePolicy::parse(part);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  if (out.empty()) throw Error(ErrorCode::kConfig, key + " lists no edge policy");
  return out;
}

std::string policies_str(const std::vector<EdgePolicy>& policies) {
  std::string out;
  for (const auto& p : policies) {
    if (!out.empty()) out += ',';
    out += p.str();
  }
  return out;
}

std::optional<fs::path> as_path(const std::string& value) {
  if (value.empty()) return std::nullopt;
  return fs::path(value);
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& config_key_defaults() { return kDefaults; }

static PipelineConfig build_config(const KeyValueFile& keys) {
  std::map<std::string, std::string> v(kDefaults.begin(), kDefaults.end());
  std::vector<std::pair<std::string, std::string>> synth_keys;
  for (const auto& [key, value] : keys.entries()) {
    if (key.rfind("synth.", 0) == 0) {
      synth_keys.emplace_back(key, value);
      continue;
    }
    if (!v.contains(key)) throw Error(ErrorCode::kConfig, "unknown configuration key '" + key + "'");
    v[key] = value;
  }

  PipelineConfig c;
  c.corpus = as_path(v["corpus"]);
  c.out = v["out"].empty() ? fs::path("out") : fs::path(v["out"]);
  if (!v["seed"].empty()) {
    const auto s = parse_int(v["seed"], "seed");
    if (s < 0) throw Error(ErrorCode::kConfig, "seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  c.stopwords = v["stopwords"] == "builtin" ? ResourceRef{} : ResourceRef{fs::path(v["stopwords"])};
  c.custom_stopwords = as_path(v["custom_stopwords"]);
  if (v["lexicon"] == "none") c.lexicon.reset();
  else c.lexicon = v["lexicon"] == "builtin" ? ResourceRef{} : ResourceRef{fs::path(v["lexicon"])};
  c.parse.strict = as_bool(v["strict"], "strict");
  c.parse.window_begin = as_month(v["window.begin"], "window.begin");
  c.parse.window_end = as_month(v["window.end"], "window.end");
  c.origin = as_month(v["origin"], "origin");
  c.convention = parse_convention(v["convention"]);
  c.min_count = as_count(v["min_count"], "min_count");
  if (c.min_count < 1) throw Error(ErrorCode::kConfig, "min_count must be >= 1");

  c.k = as_count(v["lda.k"], "lda.k");
  if (!v["lda.alpha"].empty()) c.alpha = parse_double(v["lda.alpha"], "lda.alpha");
  c.beta = parse_double(v["lda.beta"], "lda.beta");
  c.iterations = as_count(v["lda.iterations"], "lda.iterations");
  c.lda().validate();
  c.inference.sweeps = as_count(v["infer.sweeps"], "infer.sweeps");
  c.inference.window = as_count(v["infer.window"], "infer.window");
  c.inference.validate();
  c.topwords_n = as_count(v["topwords.n"], "topwords.n");
  if (c.topwords_n < 1) throw Error(ErrorCode::kConfig, "topwords.n must be >= 1");

  c.scheme = AssignmentScheme::parse(v["scheme"]);
  if (v["topics"] != "all") {
    std::vector<std::size_t> t;
    for (const auto& part : split(v["topics"], ',')) {
      if (trim(part).empty()) continue;
      const auto id = as_count(part, "topics");
      if (id >= c.k) throw Error(ErrorCode::kConfig, "topic " + std::to_string(id) + " out of range for lda.k");
      t.push_back(id);
    }
    if (t.empty()) throw Error(ErrorCode::kConfig, "topics lists no topic; use 'all' for every topic");
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    c.topics = std::move(t);
  }
  c.policies = as_policies(v["lifetimes"], "lifetimes");
  c.max_authors = as_count(v["max_authors"], "max_authors");

  c.path.exact_limit = as_count(v["path.exact_limit"], "path.exact_limit");
  c.path.sources = as_count(v["path.sources"], "path.sources");
  if (c.path.sources < 1) throw Error(ErrorCode::kConfig, "path.sources must be >= 1");
  c.thresholds.f_dense = parse_double(v["classify.f_dense"], "classify.f_dense");
  c.thresholds.f_tree = parse_double(v["classify.f_tree"], "classify.f_tree");
  c.thresholds.decline = parse_double(v["classify.decline"], "classify.decline");
  c.thresholds.smoothing_window = as_count(v["classify.window"], "classify.window");
  c.thresholds.validate();
  c.null_instances = as_count(v["null.instances"], "null.instances");
  if (c.null_instances < 1) throw Error(ErrorCode::kConfig, "null.instances must be >= 1");
  c.null_articles = as_count(v["null.articles"], "null.articles");
  c.null_policies = as_policies(v["null.lifetimes"], "null.lifetimes");
  c.threads = std::max<std::size_t>(1, as_count(v["threads"], "threads"));

  c.apply_model = as_path(v["apply.model"]);
  c.apply_corpus = as_path(v["apply.corpus"]);
  c.apply_tokens = as_path(v["apply.tokens"]);
  c.synth = synth_spec_from_pairs(synth_keys);
  return c;
}

PipelineConfig PipelineConfig::from_keys(const KeyValueFile& keys) {
  try {
    return build_config(keys);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, std::string("invalid configuration: ") + e.what());
  }
}

KeyValueFile PipelineConfig::echo() const {
  KeyValueFile kv;
  auto path_or_empty = [](const std::optional<fs::path>& p) { return p ? p->string() : std::string(); };
  kv.set("corpus", path_or_empty(corpus));
  kv.set("seed", seed ? std::to_string(*seed) : std::string());
  kv.set("stopwords", stopwords.str());
  kv.set("custom_stopwords", path_or_empty(custom_stopwords));
  kv.set("lexicon", lexicon ? lexicon->str() : std::string("none"));
  kv.set("strict", parse.strict ? "true" : "false");
  kv.set("window.begin", parse.window_begin ? parse.window_begin->str() : std::string());
  kv.set("window.end", parse.window_end ? parse.window_end->str() : std::string());
  kv.set("origin", origin ? origin->str() : std::string());
  kv.set("convention", std::string(convention_name(convention)));
  kv.set("min_count", std::to_string(min_count));
  kv.set("lda.k", std::to_string(k));
  kv.set("lda.alpha", format_double(lda().alpha));
  kv.set("lda.beta", format_double(beta));
  kv.set("lda.iterations", std::to_string(iterations));
  kv.set("infer.sweeps", std::to_string(inference.sweeps));
  kv.set("infer.window", std::to_string(inference.window));
  kv.set("topwords.n", std::to_string(topwords_n));
  kv.set("scheme", scheme.str());
  std::string t = "all";
  if (topics) {
    t.clear();
    for (auto id : *topics) t += (t.empty() ? "" : ",") + std::to_string(id);
  }
  kv.set("topics", t);
  kv.set("lifetimes", policies_str(policies));
  kv.set("max_authors", std::to_string(max_authors));
  kv.set("path.exact_limit", std::to_string(path.exact_limit));
  kv.set("path.sources", std::to_string(path.sources));
  kv.set("classify.f_dense", format_double(thresholds.f_dense));
  kv.set("classify.f_tree", format_double(thresholds.f_tree));
  kv.set("classify.decline", format_double(thresholds.decline));
  kv.set("classify.window", std::to_string(thresholds.smoothing_window));
  kv.set("null.instances", std::to_string(null_instances));
  kv.set("null.articles", std::to_string(null_articles));
  kv.set("null.lifetimes", policies_str(null_policies));
  kv.set("threads", std::to_string(threads));
  kv.set("apply.model", path_or_empty(apply_model));
  kv.set("apply.corpus", path_or_empty(apply_corpus));
  kv.set("apply.tokens", path_or_empty(apply_tokens));
  return kv;
}

LdaConfig PipelineConfig::lda() const {
  LdaConfig c = LdaConfig::defaults(std::max<std::size_t>(k, 1), seed.value_or(0) + seed_offset::kTrain);
  c.k = k;
  if (alpha) c.alpha = *alpha;
  c.beta = beta;
  c.iterations = iterations;
  return c;
}

std::uint64_t PipelineConfig::require_seed() const {
  if (!seed) throw Error(ErrorCode::kConfig, "a seed is required (set 'seed' or pass --seed)");
  return *seed;
}

// ---------------------------------------------------------------------------
// File naming

std::string topic_tag(std::size_t topic) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "topic_%03zu", topic);
  return buf;
}

std::string events_file(std::size_t topic) { return "events/" + topic_tag(topic) + ".events"; }

std::string series_file(std::size_t topic, const EdgePolicy& policy) {
  return "series/" + topic_tag(topic) + "_life_" + policy.str() + ".tsv";
}

std::string curve_file(std::size_t topic, const EdgePolicy& policy) {
  return "curves/" + topic_tag(topic) + "_life_" + policy.str() + ".csv";
}

std::string null_file(std::size_t topic, const EdgePolicy& policy) {
  return "null/" + topic_tag(topic) + "_life_" + policy.str() + ".csv";
}

// ---------------------------------------------------------------------------
// Pipeline

struct Pipeline::StageRecord {
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;  // label -> sha256
  std::vector<std::pair<std::string, std::string>> outputs; // relative path -> sha256
};

namespace {

constexpr std::string_view kManifest = "manifest.txt";

using StageFn = void (Pipeline::*)(Pipeline::StageRecord&);

std::vector<std::size_t> read_topic_counts(const std::string& text) {
  std::vector<std::size_t> counts;
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0] != "topic,n_articles") throw Error(ErrorCode::kParse, "topic_counts.csv: bad header");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto c = split(lines[i], ',');
    if (c.size() != 2) throw Error(ErrorCode::kParse, "topic_counts.csv: malformed row");
    counts.push_back(static_cast<std::size_t>(parse_int(c[1], "n_articles")));
  }
  return counts;
}

template <typename T, typename Fn>
std::vector<T> run_indexed(std::size_t n, std::size_t threads, Fn&& fn) {
  std::vector<T> out(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  for (std::size_t start = 0; start < n; start += threads) {
    const std::size_t end = std::min(n, start + threads);
    std::vector<std::future<T>> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(std::async(std::launch::async, fn, i));
    for (std::size_t i = start; i < end; ++i) out[i] = batch[i - start].get();
  }
  return out;
}

}  // namespace

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {}

const std::vector<std::string>& Pipeline::stage_names() {
  static const std::vector<std::string> names = {"ingest",     "train",  "topwords", "assign",
                                                 "assemble",   "measure", "classify", "null",
                                                 "modularity", "report", "synth",    "apply"};
  return names;
}

fs::path Pipeline::out(std::string_view rel) const { return config_.out / fs::path(rel); }

void Pipeline::require(std::string_view rel, std::string_view producer) const {
  if (!fs::exists(out(rel)))
    throw Error(ErrorCode::kDependency, "missing " + std::string(rel) + " (produced by stage '" +
                                            std::string(producer) + "'); run '" + std::string(producer) +
                                            "' first");
}

void Pipeline::write(StageRecord& rec, std::string_view rel, std::string_view contents) {
  write_file_atomic(out(rel), contents);
  rec.outputs.emplace_back(std::string(rel), sha256_hex(contents));
}

void Pipeline::warn(std::string message) { warnings_.push_back(std::move(message)); }

std::vector<std::size_t> Pipeline::selected_topics(std::size_t k) const {
  std::vector<std::size_t> out;
  if (config_.topics) {
    for (auto t : *config_.topics) {
      if (t >= k) throw Error(ErrorCode::kConfig, "topic " + std::to_string(t) + " out of range (k=" + std::to_string(k) + ")");
      out.push_back(t);
    }
  } else {
    for (std::size_t t = 0; t < k; ++t) out.push_back(t);
  }
  return out;
}

void Pipeline::run_stage(std::string_view name) {
  static const std::map<std::string, StageFn, std::less<>> stages = {
      {"ingest", &Pipeline::ingest},         {"train", &Pipeline::train},
      {"topwords", &Pipeline::topwords},     {"assign", &Pipeline::assign},
      {"assemble", &Pipeline::assemble},     {"measure", &Pipeline::measure},
      {"classify", &Pipeline::classify},     {"null", &Pipeline::null},
      {"modularity", &Pipeline::modularity}, {"report", &Pipeline::report},
      {"synth", &Pipeline::synth},           {"apply", &Pipeline::apply},
  };
  const auto it = stages.find(name);
  if (it == stages.end()) throw Error(ErrorCode::kInvalidArgument, "unknown stage '" + std::string(name) + "'");
  config_.require_seed();
  StageRecord rec;
  rec.name = std::string(name);
  const auto start = std::chrono::steady_clock::now();
  (this->*(it->second))(rec);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  update_manifest(rec, seconds);
}

void Pipeline::run_all() {
  for (const char* stage :
       {"ingest", "train", "topwords", "assign", "assemble", "measure", "classify", "null", "modularity", "report"})
    run_stage(stage);
}

void Pipeline::update_manifest(const StageRecord& rec, double seconds) {
  KeyValueFile manifest;
  if (fs::exists(out(kManifest))) manifest = KeyValueFile::parse(read_file(out(kManifest)), "manifest");
  manifest.set("tool.version", std::string(kToolVersion));
  for (const auto& [k, v] : config_.echo().entries()) manifest.set("config." + k, v);
  for (const auto& [label, digest] : rec.inputs) manifest.set("input." + label + ".sha256", digest);
  std::string outputs;
  for (const auto& [rel, digest] : rec.outputs) {
    manifest.set("output." + rel + ".sha256", digest);
    outputs += (outputs.empty() ? "" : ",") + rel;
  }
  manifest.set("stage." + rec.name + ".outputs", outputs);
  manifest.set("stage." + rec.name + ".seconds", format_double(seconds));
  write_file_atomic(out(kManifest), manifest.serialize());
}

// ---------------------------------------------------------------------------
// Stages

namespace {

TextResources load_resources(const PipelineConfig& c, Pipeline::StageRecord& rec) {
  std::vector<std::string> stop_texts;
  stop_texts.push_back(c.stopwords.path ? read_file(*c.stopwords.path) : std::string(builtin::kStopwords));
  rec.inputs.emplace_back("stopwords", sha256_hex(stop_texts.back()));
  if (c.custom_stopwords) {
    stop_texts.push_back(read_file(*c.custom_stopwords));
    rec.inputs.emplace_back("custom_stopwords", sha256_hex(stop_texts.back()));
  }
  std::optional<std::string> lexicon;
  if (c.lexicon) {
    lexicon = c.lexicon->path ? read_file(*c.lexicon->path) : std::string(builtin::kLemmas);
    rec.inputs.emplace_back("lexicon", sha256_hex(*lexicon));
  }
  return TextResources::parse(stop_texts, lexicon);
}

Corpus read_corpus(const fs::path& path, const ParseOptions& options) { return load_corpus(path, options); }

}  // namespace

void Pipeline::ingest(StageRecord& rec) {
  if (!config_.corpus) throw Error(ErrorCode::kConfig, "stage 'ingest' needs 'corpus'");
  const auto resources = load_resources(config_, rec);
  rec.inputs.emplace_back("corpus", sha256_file(*config_.corpus));
  const Corpus corpus = read_corpus(*config_.corpus, config_.parse);
  if (corpus.documents.empty()) warn("corpus has no well-formed documents");

  std::string errors = "line\tmessage\n";
  for (const auto& e : corpus.errors) errors += std::to_string(e.line) + '\t' + e.message + '\n';
  if (!corpus.errors.empty()) warn(std::to_string(corpus.errors.size()) + " malformed corpus lines skipped");

  std::vector<RawTokens> raw;
  raw.reserve(corpus.documents.size());
  for (const auto& d : corpus.documents) raw.push_back({d.doc_id, d.month, preprocess_document(d, resources)});
  const auto tokenized = build_vocabulary(raw, config_.min_count);

  write(rec, "corpus.jsonl", serialize_corpus(corpus.documents));
  write(rec, "ingest_errors.tsv", errors);
  write(rec, "tokens.txt", serialize_tokenized(tokenized));
}

void Pipeline::train(StageRecord& rec) {
  require("tokens.txt", "ingest");
  const auto text = read_file(out("tokens.txt"));
  rec.inputs.emplace_back("tokens", sha256_hex(text));
  const auto corpus = parse_tokenized(text);
  auto model = train_lda(corpus.docs, corpus.vocabulary, config_.lda());
  for (auto& w : model.warnings) warn(w);
  write(rec, "model.txt", serialize_model(model, true));
}

void Pipeline::topwords(StageRecord& rec) {
  require("model.txt", "train");
  const auto text = read_file(out("model.txt"));
  rec.inputs.emplace_back("model", sha256_hex(text));
  write(rec, "topwords.tsv", serialize_top_words(parse_model(text), config_.topwords_n));
}

void Pipeline::write_assignments(StageRecord& rec, const std::vector<TopicAssignment>& assignments, std::size_t k) {
  write(rec, "assignments.tsv", serialize_assignments(assignments));
  std::vector<std::size_t> counts(k, 0);
  for (const auto& a : assignments)
    for (auto t : a.topics) ++counts.at(t);
  std::string csv = "topic,n_articles\n";
  for (std::size_t t = 0; t < k; ++t) csv += std::to_string(t) + ',' + std::to_string(counts[t]) + '\n';
  write(rec, "topic_counts.csv", csv);
}

void Pipeline::assign(StageRecord& rec) {
  require("model.txt", "train");
  const auto text = read_file(out("model.txt"));
  rec.inputs.emplace_back("model", sha256_hex(text));
  const auto model = parse_model(text);
  if (model.theta.rows() == 0) throw Error(ErrorCode::kDependency, "model.txt carries no theta; rerun 'train'");
  write_assignments(rec, assign_articles(model.theta, model.theta_doc_ids, config_.scheme), model.k());
}

void Pipeline::write_series(StageRecord& rec, const std::vector<TopicAssignment>& assignments,
                            std::span<const Document> docs, std::size_t k, YearMonth origin) {
  std::vector<std::vector<std::string>> members(k);
  for (const auto& a : assignments)
    for (auto t : a.topics) members.at(t).push_back(a.doc_id);
  EventOptions opts{config_.convention, origin, config_.max_authors};
  for (auto t : selected_topics(k)) {
    const auto log = build_events(members[t], docs, opts);
    if (log.events.empty()) warn(topic_tag(t) + " has no assigned articles");
    write(rec, events_file(t), serialize_events(log));
  }
}

void Pipeline::assemble(StageRecord& rec) {
  require("assignments.tsv", "assign");
  require("topic_counts.csv", "assign");
  require("corpus.jsonl", "ingest");
  const auto assignments_text = read_file(out("assignments.tsv"));
  rec.inputs.emplace_back("assignments", sha256_hex(assignments_text));
  const auto k = read_topic_counts(read_file(out("topic_counts.csv"))).size();
  const Corpus corpus = read_corpus(out("corpus.jsonl"), {});
  const auto origin = config_.origin ? *config_.origin : earliest_month(corpus.documents).value_or(YearMonth{});
  write_series(rec, parse_assignments(assignments_text), corpus.documents, k, origin);

  // Snapshot edge lists for the figures; the event log remains the source of truth.
  for (auto t : selected_topics(k)) {
    const auto log = parse_events(read_file(out(events_file(t))));
    for (const auto& policy : config_.policies) write(rec, series_file(t, policy), serialize_series_edges(assemble_series(log, policy)));
  }
}

void Pipeline::write_curves(StageRecord& rec, std::size_t k) {
  struct Job {
    std::size_t topic;
    EdgePolicy policy;
  };
  std::vector<Job> jobs;
  std::vector<CollaborationEventLog> logs;
  std::map<std::size_t, std::size_t> log_of;
  for (auto t : selected_topics(k)) {
    require(events_file(t), "assemble");
    log_of[t] = logs.size();
    logs.push_back(parse_events(read_file(out(events_file(t)))));
    for (const auto& p : config_.policies) jobs.push_back({t, p});
  }
  PathConfig path = config_.path;
  path.seed = config_.require_seed() + seed_offset::kPath;
  const auto curves = run_indexed<std::optional<MetricCurve>>(jobs.size(), config_.threads, [&](std::size_t i) {
    const auto& log = logs[log_of.at(jobs[i].topic)];
    if (log.events.empty()) return std::optional<MetricCurve>{};
    return std::optional<MetricCurve>{measure_series(assemble_series(log, jobs[i].policy), path)};
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    MetricCurve empty;
    write(rec, curve_file(jobs[i].topic, jobs[i].policy), serialize_curve(curves[i] ? *curves[i] : empty));
  }
}

void Pipeline::measure(StageRecord& rec) {
  require("topic_counts.csv", "assign");
  write_curves(rec, read_topic_counts(read_file(out("topic_counts.csv"))).size());
}

void Pipeline::write_classes(StageRecord& rec, std::size_t k) {
  const auto counts = read_topic_counts(read_file(out("topic_counts.csv")));
  std::string csv =
      "topic,lifetime,n_articles,class,final_gcc_fraction,peak_month_index,peak_n_nodes,peak_mpl,final_mpl,"
      "decline_ratio,smoothing_window\n";
  for (auto t : selected_topics(k)) {
    for (const auto& p : config_.policies) {
      require(curve_file(t, p), "measure");
      const auto curve = parse_curve(read_file(out(curve_file(t, p))));
      csv += std::to_string(t) + ',' + p.str() + ',' + std::to_string(counts.at(t)) + ',';
      try {
        const auto r = classify_assembly(curve, config_.thresholds);
        const auto& d = r.diagnostics;
        csv += std::string(assembly_class_name(r.assembly_class)) + ',' + format_double(d.final_gcc_fraction) + ',' +
               (d.peak_month_index ? std::to_string(*d.peak_month_index) : "NA") + ',' +
               (d.peak_n_nodes ? std::to_string(*d.peak_n_nodes) : "NA") + ',' + format_double(d.peak_path_length) +
               ',' + format_double(d.final_path_length) + ',' + format_double(d.decline_ratio) + ',' +
               std::to_string(d.smoothing_window) + '\n';
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDomain) throw;
        const std::string final_gcc = curve.points.empty() ? "NA" : format_double(curve.points.back().gcc_fraction);
        csv += "Unclassifiable," + final_gcc + ",NA,NA,NA,NA,NA,NA\n";
      }
    }
  }
  write(rec, "classes.csv", csv);
}

void Pipeline::classify(StageRecord& rec) {
  require("topic_counts.csv", "assign");
  write_classes(rec, read_topic_counts(read_file(out("topic_counts.csv"))).size());
}

void Pipeline::null(StageRecord& rec) {
  require("corpus.jsonl", "ingest");
  require("topic_counts.csv", "assign");
  const auto counts = read_topic_counts(read_file(out("topic_counts.csv")));
  const Corpus corpus = read_corpus(out("corpus.jsonl"), {});
  const auto origin = config_.origin ? *config_.origin : earliest_month(corpus.documents).value_or(YearMonth{});
  for (auto t : selected_topics(counts.size())) {
    const std::size_t n_articles = config_.null_articles ? config_.null_articles : counts[t];
    if (n_articles == 0) {
      warn("null model skipped for " + topic_tag(t) + ": no articles");
      continue;
    }
    for (const auto& policy : config_.null_policies) {
      NullModelConfig nc;
      nc.n_articles = n_articles;
      nc.n_instances = config_.null_instances;
      nc.policy = policy;
      nc.seed = config_.require_seed() + seed_offset::kNull + 1000 * t;
      nc.path = config_.path;
      nc.path.seed = config_.require_seed() + seed_offset::kPath;
      nc.events = {config_.convention, origin, config_.max_authors};
      nc.threads = config_.threads;
      write(rec, null_file(t, policy), serialize_null_band(null_model(corpus.documents, nc)));
    }
  }
}

void Pipeline::modularity(StageRecord& rec) {
  require("topic_counts.csv", "assign");
  const auto topics = selected_topics(read_topic_counts(read_file(out("topic_counts.csv"))).size());
  std::map<std::size_t, CollaborationEventLog> logs;
  for (auto t : topics) {
    require(events_file(t), "assemble");
    logs.emplace(t, parse_events(read_file(out(events_file(t)))));
  }
  std::map<std::pair<std::size_t, std::size_t>, double> scores;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    for (std::size_t j = i + 1; j < topics.size(); ++j) {
      const auto labeling = label_topic_pair(logs.at(topics[i]), logs.at(topics[j]));
      if (labeling.edges.empty()) {
        warn("modularity undefined for topics " + std::to_string(topics[i]) + "," + std::to_string(topics[j]) +
             ": no edges");
        continue;
      }
      const double q = pairwise_modularity(labeling);
      scores[{topics[i], topics[j]}] = q;
      scores[{topics[j], topics[i]}] = q;
    }
  }
  std::string csv = "topic_a,topic_b,q_over_qmax\n";
  for (const auto& [pair, q] : scores)
    csv += std::to_string(pair.first) + ',' + std::to_string(pair.second) + ',' + format_double(q) + '\n';
  write(rec, "modularity.csv", csv);
}

void Pipeline::report(StageRecord& rec) {
  require("classes.csv", "classify");
  require("topic_counts.csv", "assign");
  const auto counts = read_topic_counts(read_file(out("topic_counts.csv")));
  const EdgePolicy policy = std::find(config_.policies.begin(), config_.policies.end(), EdgePolicy::unlimited()) !=
                                    config_.policies.end()
                                ? EdgePolicy::unlimited()
                                : config_.policies.front();

  std::optional<TopicModel> model;
  if (fs::exists(out("model.txt"))) model = parse_model(read_file(out("model.txt")));

  std::map<std::size_t, std::vector<std::string>> rows;
  const auto lines = split(read_file(out("classes.csv")), '\n');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto c = split(lines[i], ',');
    if (c.size() != 11) throw Error(ErrorCode::kParse, "classes.csv: malformed row");
    if (c[1] != policy.str()) continue;
    rows[static_cast<std::size_t>(parse_int(c[0], "topic"))] = std::move(c);
  }

  std::string csv =
      "topic,n_articles,top_terms,class,final_gcc_fraction,decline_ratio,null_mean_gcc_fraction,"
      "null_std_gcc_fraction\n";
  std::map<std::string, std::size_t> tally{{"DenseGC", 0}, {"TreelikeGC", 0}, {"NoGC", 0}, {"Unclassifiable", 0}};
  for (const auto& [t, c] : rows) {
    std::string terms;
    if (model && t < model->k()) {
      for (const auto& w : top_words(*model, t, 5)) terms += (terms.empty() ? "" : " ") + w.term;
    }
    std::string null_mean = "NA", null_std = "NA";
    if (fs::exists(out(null_file(t, policy))) && fs::exists(out(curve_file(t, policy)))) {
      const auto band = parse_null_band(read_file(out(null_file(t, policy))));
      const auto curve = parse_curve(read_file(out(curve_file(t, policy))));
      if (!curve.points.empty()) {
        if (const auto* bin = band.bin_for(curve.points.back().n_nodes)) {
          null_mean = format_double(bin->mean_gcc_fraction);
          null_std = format_double(bin->std_gcc_fraction);
        }
      }
    }
    ++tally[c[3]];
    csv += std::to_string(t) + ',' + std::to_string(counts.at(t)) + ',' + terms + ',' + c[3] + ',' + c[4] + ',' +
           c[9] + ',' + null_mean + ',' + null_std + '\n';
  }
  write(rec, "report.csv", csv);
  std::string summary = "class,count\n";
  for (const char* name : {"DenseGC", "TreelikeGC", "NoGC", "Unclassifiable"})
    summary += std::string(name) + ',' + std::to_string(tally[name]) + '\n';
  write(rec, "report_summary.csv", summary);
}

void Pipeline::synth(StageRecord& rec) {
  const auto corpus = generate_synthetic(config_.synth, config_.require_seed() + seed_offset::kSynth);
  write(rec, "synthetic.jsonl", serialize_corpus(corpus.documents));
  write(rec, "synthetic_truth.tsv", serialize_truth(corpus));
  write(rec, "synthetic_phi.tsv", serialize_planted_phi(corpus));
}

void Pipeline::apply(StageRecord& rec) {
  if (!config_.apply_model) throw Error(ErrorCode::kConfig, "stage 'apply' needs 'apply.model'");
  if (!config_.apply_corpus) throw Error(ErrorCode::kConfig, "stage 'apply' needs 'apply.corpus'");
  const auto model_text = read_file(*config_.apply_model);
  rec.inputs.emplace_back("model", sha256_hex(model_text));
  const auto model = parse_model(model_text);
  const auto resources = load_resources(config_, rec);
  rec.inputs.emplace_back("corpus_b", sha256_file(*config_.apply_corpus));
  const Corpus corpus = read_corpus(*config_.apply_corpus, config_.parse);
  if (corpus.documents.empty()) warn("corpus B is empty");

  TokenizedCorpus tokenized{model.vocabulary, {}};
  if (config_.apply_tokens) {
    const auto text = read_file(*config_.apply_tokens);
    rec.inputs.emplace_back("tokens_b", sha256_hex(text));
    auto given = parse_tokenized(text);
    if (given.vocabulary.digest() != model.vocabulary.digest())
      throw Error(ErrorCode::kMismatch, "vocabulary of " + config_.apply_tokens->string() +
                                            " differs from the model vocabulary (digest " +
                                            given.vocabulary.digest() + " vs " + model.vocabulary.digest() + ")");
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < given.docs.size(); ++i) by_id.emplace(given.docs[i].doc_id, i);
    for (const auto& d : corpus.documents) {
      auto it = by_id.find(d.doc_id);
      if (it == by_id.end())
        throw Error(ErrorCode::kMismatch, "document '" + d.doc_id + "' missing from " + config_.apply_tokens->string());
      tokenized.docs.push_back(given.docs[it->second]);
    }
  } else {
    std::vector<RawTokens> raw;
    for (const auto& d : corpus.documents) raw.push_back({d.doc_id, d.month, preprocess_document(d, resources)});
    tokenized.docs = map_to_vocabulary(model.vocabulary, raw);
  }
  write(rec, "tokens.txt", serialize_tokenized(tokenized));

  const std::size_t k = model.k();
  Matrix thetas(tokenized.docs.size(), k);
  std::vector<std::string> ids;
  std::string theta_tsv = "doc_id";
  for (std::size_t t = 0; t < k; ++t) theta_tsv += "\ttopic_" + std::to_string(t);
  theta_tsv += '\n';
  const auto base = config_.require_seed() + seed_offset::kInference;
  const auto rows = run_indexed<std::vector<double>>(tokenized.docs.size(), config_.threads, [&](std::size_t d) {
    return infer_theta(model, tokenized.docs[d], base + d, config_.inference);
  });
  for (std::size_t d = 0; d < rows.size(); ++d) {
    std::copy(rows[d].begin(), rows[d].end(), thetas.row(d).begin());
    ids.push_back(tokenized.docs[d].doc_id);
    theta_tsv += ids.back();
    for (double x : rows[d]) theta_tsv += '\t' + format_double(x);
    theta_tsv += '\n';
  }
  write(rec, "thetas.tsv", theta_tsv);
  const auto assignments = assign_articles(thetas, ids, config_.scheme);
  write_assignments(rec, assignments, k);
  write(rec, "corpus.jsonl", serialize_corpus(corpus.documents));
  const auto origin = config_.origin ? *config_.origin : earliest_month(corpus.documents).value_or(YearMonth{});
  write_series(rec, assignments, corpus.documents, k, origin);
  write_curves(rec, k);
  write_classes(rec, k);
}

}  // namespace coauth
