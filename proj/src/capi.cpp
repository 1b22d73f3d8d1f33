#include "coauth/coauth.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "coauth/config.hpp"
#include "coauth/error.hpp"
#include "coauth/io.hpp"
#include "coauth/pipeline.hpp"
#include "coauth/tokenize.hpp"
#include "coauth/topics.hpp"

namespace coauth::builtin {
extern const std::string_view kStopwords;
extern const std::string_view kLemmas;
}  // namespace coauth::builtin

struct coauth_pipeline {
  coauth::KeyValueFile keys;
  std::vector<std::string> warnings;
};

struct coauth_model {
  coauth::TopicModel model;
  coauth::TextResources resources;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, std::string message) {
  g_last_error = std::move(message);
  return code;
}

// Runs `fn`, translating exceptions into error codes.
template <typename Fn>
int guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return COAUTH_OK;
  } catch (const coauth::Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(COAUTH_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(COAUTH_E_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* coauth_version(void) { return coauth::kToolVersion.data(); }

const char* coauth_error_name(int code) {
  if (code == COAUTH_OK) return "ok";
  if (code == COAUTH_E_BUFFER_TOO_SMALL) return "buffer_too_small";
  if (code >= COAUTH_E_INVALID_ARGUMENT && code <= COAUTH_E_INTERNAL)
    return coauth::error_code_name(static_cast<coauth::ErrorCode>(code));
  return "unknown";
}

const char* coauth_last_error(void) { return g_last_error.c_str(); }

int coauth_pipeline_create(coauth_pipeline** out) {
  if (out == nullptr) return fail(COAUTH_E_INVALID_ARGUMENT, "null output handle");
  return guarded([&] { *out = new coauth_pipeline(); });
}

void coauth_pipeline_destroy(coauth_pipeline* pipeline) { delete pipeline; }

int coauth_pipeline_load_config(coauth_pipeline* pipeline, const char* path) {
  if (pipeline == nullptr || path == nullptr) return fail(COAUTH_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto file = coauth::KeyValueFile::load(path);
    for (auto& [k, v] : file.entries()) pipeline->keys.set(k, v);
  });
}

int coauth_pipeline_set(coauth_pipeline* pipeline, const char* key, const char* value) {
  if (pipeline == nullptr || key == nullptr || value == nullptr) return fail(COAUTH_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto trial = pipeline->keys;
    trial.set(key, value);
    coauth::PipelineConfig::from_keys(trial);  // rejects unknown keys and bad values early
    pipeline->keys = std::move(trial);
  });
}

int coauth_pipeline_run_stage(coauth_pipeline* pipeline, const char* stage) {
  if (pipeline == nullptr || stage == nullptr) return fail(COAUTH_E_INVALID_ARGUMENT, "null argument");
  pipeline->warnings.clear();
  std::unique_ptr<coauth::Pipeline> runner;
  const int rc = guarded([&] {
    runner = std::make_unique<coauth::Pipeline>(coauth::PipelineConfig::from_keys(pipeline->keys));
    if (std::string_view(stage) == "run") runner->run_all();
    else runner->run_stage(stage);
  });
  if (runner) pipeline->warnings = runner->warnings();
  return rc;
}

size_t coauth_pipeline_warning_count(const coauth_pipeline* pipeline) {
  return pipeline ? pipeline->warnings.size() : 0;
}

const char* coauth_pipeline_warning(const coauth_pipeline* pipeline, size_t index) {
  if (pipeline == nullptr || index >= pipeline->warnings.size()) return nullptr;
  return pipeline->warnings[index].c_str();
}

int coauth_model_load(const char* path, coauth_model** out) {
  if (path == nullptr || out == nullptr) return fail(COAUTH_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto m = std::make_unique<coauth_model>();
    m->model = coauth::parse_model(coauth::read_file(path));
    const std::vector<std::string> stop{std::string(coauth::builtin::kStopwords)};
    m->resources = coauth::TextResources::parse(stop, coauth::builtin::kLemmas);
    *out = m.release();
  });
}

void coauth_model_destroy(coauth_model* model) { delete model; }

size_t coauth_model_topics(const coauth_model* model) { return model ? model->model.k() : 0; }

size_t coauth_model_vocab_size(const coauth_model* model) { return model ? model->model.vocabulary.size() : 0; }

int coauth_model_top_word(const coauth_model* model, size_t topic, size_t rank, const char** term,
                          double* probability) {
  if (model == nullptr || term == nullptr) return fail(COAUTH_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto words = coauth::top_words(model->model, topic, rank + 1);
    if (rank >= words.size()) throw coauth::Error(coauth::ErrorCode::kInvalidArgument, "rank beyond vocabulary");
    const auto id = model->model.vocabulary.find(words[rank].term);
    *term = model->model.vocabulary.term(*id).c_str();
    if (probability) *probability = words[rank].probability;
  });
}

int coauth_model_infer_text(const coauth_model* model, const char* text, uint64_t seed, double* theta, size_t k) {
  if (model == nullptr || text == nullptr || theta == nullptr) return fail(COAUTH_E_INVALID_ARGUMENT, "null argument");
  if (k != model->model.k()) return fail(COAUTH_E_INVALID_ARGUMENT, "theta length does not match topic count");
  return guarded([&] {
    const std::vector<coauth::RawTokens> raw{{"text", {}, coauth::preprocess_text(text, model->resources)}};
    const auto docs = coauth::map_to_vocabulary(model->model.vocabulary, raw);
    const auto result = coauth::infer_theta(model->model, docs.front(), seed);
    std::copy(result.begin(), result.end(), theta);
  });
}

int coauth_normalize_author(const char* raw, int convention, char* buf, size_t capacity, size_t* needed) {
  if (raw == nullptr) return fail(COAUTH_E_INVALID_ARGUMENT, "null argument");
  if (convention != COAUTH_CONVENTION_FULL_NAME && convention != COAUTH_CONVENTION_FIRST_INITIAL_LAST_NAME)
    return fail(COAUTH_E_INVALID_ARGUMENT, "unknown naming convention");
  std::string label;
  const int rc = guarded([&] {
    label = coauth::normalize_author(raw,
                                     convention == COAUTH_CONVENTION_FULL_NAME
                                         ? coauth::NameConvention::kFullName
                                         : coauth::NameConvention::kFirstInitialLastName)
                .label;
  });
  if (rc != COAUTH_OK) return rc;
  if (needed) *needed = label.size() + 1;
  if (buf == nullptr || capacity < label.size() + 1)
    return fail(COAUTH_E_BUFFER_TOO_SMALL, "buffer needs " + std::to_string(label.size() + 1) + " bytes");
  std::memcpy(buf, label.c_str(), label.size() + 1);
  return COAUTH_OK;
}

}  // extern "C"
