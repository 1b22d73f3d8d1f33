/* C interface to the coauth library.
 *
 * Every fallible call returns COAUTH_OK (0) or a positive error code; the
 * message of the most recent failure on the calling thread is available from
 * coauth_last_error(). Handles are opaque and owned by the caller, who
 * releases them with the matching *_destroy function. A pipeline handle must
 * not be used from two threads at once; a model handle is read-only after
 * loading and may be shared.
 */
#ifndef COAUTH_COAUTH_H
#define COAUTH_COAUTH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define COAUTH_API __declspec(dllexport)
#else
#define COAUTH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define COAUTH_OK 0
#define COAUTH_E_INVALID_ARGUMENT 1
#define COAUTH_E_IO 2
#define COAUTH_E_PARSE 3
#define COAUTH_E_CONFIG 4
#define COAUTH_E_DEPENDENCY 5
#define COAUTH_E_DOMAIN 6
#define COAUTH_E_MISMATCH 7
#define COAUTH_E_INTERNAL 8
#define COAUTH_E_BUFFER_TOO_SMALL 9

#define COAUTH_CONVENTION_FULL_NAME 0
#define COAUTH_CONVENTION_FIRST_INITIAL_LAST_NAME 1

typedef struct coauth_pipeline coauth_pipeline;
typedef struct coauth_model coauth_model;

COAUTH_API const char* coauth_version(void);
/* Short stable name for an error code, e.g. "dependency". */
COAUTH_API const char* coauth_error_name(int code);
/* Empty string when the last call on this thread succeeded. */
COAUTH_API const char* coauth_last_error(void);

/* Pipeline: flat key/value configuration plus stage execution. */
COAUTH_API int coauth_pipeline_create(coauth_pipeline** out);
COAUTH_API void coauth_pipeline_destroy(coauth_pipeline* pipeline);
/* Reads a "key = value" file; keys already set keep the file's value only if
 * set again afterwards, so call this before coauth_pipeline_set overrides. */
COAUTH_API int coauth_pipeline_load_config(coauth_pipeline* pipeline, const char* path);
COAUTH_API int coauth_pipeline_set(coauth_pipeline* pipeline, const char* key, const char* value);
/* One of ingest, train, topwords, assign, assemble, measure, classify, null,
 * modularity, report, synth, apply; "run" executes ingest through report. */
COAUTH_API int coauth_pipeline_run_stage(coauth_pipeline* pipeline, const char* stage);
COAUTH_API size_t coauth_pipeline_warning_count(const coauth_pipeline* pipeline);
/* Valid until the next run on this handle; NULL when out of range. */
COAUTH_API const char* coauth_pipeline_warning(const coauth_pipeline* pipeline, size_t index);

/* Trained topic model loaded from a model file. */
COAUTH_API int coauth_model_load(const char* path, coauth_model** out);
COAUTH_API void coauth_model_destroy(coauth_model* model);
COAUTH_API size_t coauth_model_topics(const coauth_model* model);
COAUTH_API size_t coauth_model_vocab_size(const coauth_model* model);
/* rank is 0-based; *term stays valid for the lifetime of the model. */
COAUTH_API int coauth_model_top_word(const coauth_model* model, size_t topic, size_t rank, const char** term,
                                     double* probability);
/* Preprocesses `text` with the builtin stopword list and lexicon and writes
 * the inferred topic mixture to theta[0..k). */
COAUTH_API int coauth_model_infer_text(const coauth_model* model, const char* text, uint64_t seed, double* theta,
                                       size_t k);

/* Writes the NUL-terminated label into buf. *needed (optional) receives the
 * buffer size required; COAUTH_E_BUFFER_TOO_SMALL when capacity is short. */
COAUTH_API int coauth_normalize_author(const char* raw, int convention, char* buf, size_t capacity,
                                       size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* COAUTH_COAUTH_H */
