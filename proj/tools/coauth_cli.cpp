// Command-line front end; talks to the library only through coauth.h.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "coauth/coauth.h"

namespace {

struct Options {
  std::string config;
  std::string seed;
  std::string out;
  std::string topics;
  std::string lifetime;
  std::string scheme;
  std::string convention;
  std::string corpus;
  std::string threads;
  std::string model;
  std::string corpus_b;
  std::string tokens_b;
  std::vector<std::string> sets;
};

int report_error(int code, const std::string& stage) {
  nlohmann::json line = {{"error", coauth_error_name(code)},
                         {"code", code},
                         {"stage", stage},
                         {"message", coauth_last_error()}};
  std::cerr << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  return code;
}

int run(const std::string& stage, const Options& o) {
  coauth_pipeline* p = nullptr;
  if (int rc = coauth_pipeline_create(&p); rc != COAUTH_OK) return report_error(rc, stage);

  auto set = [&](const char* key, const std::string& value) {
    return value.empty() ? COAUTH_OK : coauth_pipeline_set(p, key, value.c_str());
  };
  int rc = COAUTH_OK;
  if (!o.config.empty()) rc = coauth_pipeline_load_config(p, o.config.c_str());
  for (const auto& kv : o.sets) {
    if (rc != COAUTH_OK) break;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << nlohmann::json({{"error", "config"}, {"code", COAUTH_E_CONFIG}, {"stage", stage},
                                   {"message", "--set expects key=value, got '" + kv + "'"}})
                       .dump()
                << '\n';
      coauth_pipeline_destroy(p);
      return COAUTH_E_CONFIG;
    }
    rc = coauth_pipeline_set(p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
  }
  const std::pair<const char*, const std::string*> flags[] = {
      {"seed", &o.seed},         {"out", &o.out},           {"topics", &o.topics},
      {"lifetimes", &o.lifetime}, {"scheme", &o.scheme},     {"convention", &o.convention},
      {"corpus", &o.corpus},     {"threads", &o.threads},   {"apply.model", &o.model},
      {"apply.corpus", &o.corpus_b}, {"apply.tokens", &o.tokens_b},
  };
  for (const auto& [key, value] : flags) {
    if (rc != COAUTH_OK) break;
    rc = set(key, *value);
  }
  if (rc == COAUTH_OK) rc = coauth_pipeline_run_stage(p, stage.c_str());
  for (size_t i = 0; i < coauth_pipeline_warning_count(p); ++i)
    std::cerr << "warning: " << coauth_pipeline_warning(p, i) << '\n';
  const int result = rc == COAUTH_OK ? 0 : report_error(rc, stage);
  coauth_pipeline_destroy(p);
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic-field co-authorship network assembly pipeline"};
  app.set_version_flag("--version", std::string(coauth_version()));
  app.require_subcommand(1);

  Options o;
  const std::vector<std::pair<std::string, std::string>> stages = {
      {"ingest", "parse the corpus, normalize and tokenize text"},
      {"train", "train the topic model"},
      {"topwords", "write the most probable terms of every topic"},
      {"assign", "assign articles to topics"},
      {"assemble", "build per-topic collaboration event logs"},
      {"measure", "measure giant-component and path-length curves"},
      {"classify", "classify each curve as NoGC, TreelikeGC or DenseGC"},
      {"null", "random-article null-model bands"},
      {"modularity", "pairwise topic modularity"},
      {"report", "summary table of assembly classes"},
      {"synth", "generate a planted synthetic corpus"},
      {"apply", "apply a trained model to a second corpus"},
      {"run", "ingest through report in one go"},
  };
  for (const auto& [name, help] : stages) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "flat key = value configuration file");
    sub->add_option("--seed", o.seed, "global seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--topics", o.topics, "comma-separated topic ids or 'all'");
    sub->add_option("--lifetime", o.lifetime, "edge lifetimes in months, e.g. unlimited,24,60,120");
    sub->add_option("--scheme", o.scheme, "threshold:<tau> or coverage:<c>");
    sub->add_option("--convention", o.convention, "author naming: full or initial");
    sub->add_option("--corpus", o.corpus, "corpus file (JSON Lines)");
    sub->add_option("--threads", o.threads, "worker threads for measure/null/apply");
    sub->add_option("--set", o.sets, "override any configuration key (key=value)");
    if (name == "apply") {
      sub->add_option("--model", o.model, "model file from 'train'");
      sub->add_option("--corpus-b", o.corpus_b, "second corpus (JSON Lines)");
      sub->add_option("--tokens-b", o.tokens_b, "pre-tokenized second corpus");
    }
  }

  CLI11_PARSE(app, argc, argv);
  for (auto* sub : app.get_subcommands()) return run(sub->get_name(), o);
  return 0;
}
