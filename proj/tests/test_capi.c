#include <math.h>
#include <stdio.h>
#include <string.h>

#include "coauth/coauth.h"

static int failures = 0;

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void check_names(void) {
  char buf[64];
  size_t needed = 0;
  CHECK(coauth_normalize_author("Lindsay M. Barnes", COAUTH_CONVENTION_FULL_NAME, buf, sizeof buf, &needed) ==
        COAUTH_OK);
  CHECK(strcmp(buf, "lindsay m barnes") == 0);
  CHECK(needed == strlen("lindsay m barnes") + 1);
  CHECK(coauth_normalize_author("Lindsay M. Barnes", COAUTH_CONVENTION_FIRST_INITIAL_LAST_NAME, buf, sizeof buf,
                                NULL) == COAUTH_OK);
  CHECK(strcmp(buf, "l barnes") == 0);
  CHECK(coauth_normalize_author("Lindsay M. Barnes", COAUTH_CONVENTION_FULL_NAME, buf, 4, &needed) ==
        COAUTH_E_BUFFER_TOO_SMALL);
  CHECK(needed == 17);
  CHECK(coauth_normalize_author("...", COAUTH_CONVENTION_FULL_NAME, buf, sizeof buf, NULL) ==
        COAUTH_E_INVALID_ARGUMENT);
  CHECK(strlen(coauth_last_error()) > 0);
  CHECK(coauth_normalize_author("A B", 7, buf, sizeof buf, NULL) == COAUTH_E_INVALID_ARGUMENT);
  CHECK(coauth_normalize_author(NULL, 0, buf, sizeof buf, NULL) == COAUTH_E_INVALID_ARGUMENT);
}

static void check_pipeline(const char* dir) {
  coauth_pipeline* p = NULL;
  char path[1024];
  CHECK(coauth_pipeline_create(&p) == COAUTH_OK);
  CHECK(coauth_pipeline_set(p, "no.such.key", "1") == COAUTH_E_CONFIG);
  CHECK(coauth_pipeline_set(p, "lda.k", "three") == COAUTH_E_CONFIG);
  CHECK(coauth_pipeline_set(p, "out", dir) == COAUTH_OK);
  CHECK(coauth_pipeline_set(p, "seed", "5") == COAUTH_OK);
  CHECK(coauth_pipeline_run_stage(p, "train") == COAUTH_E_DEPENDENCY);
  CHECK(strstr(coauth_last_error(), "ingest") != NULL);
  CHECK(strcmp(coauth_error_name(COAUTH_E_DEPENDENCY), "dependency") == 0);

  snprintf(path, sizeof path, "%s/synthetic.jsonl", dir);
  CHECK(coauth_pipeline_set(p, "corpus", path) == COAUTH_OK);
  CHECK(coauth_pipeline_set(p, "synth.topics", "2") == COAUTH_OK);
  CHECK(coauth_pipeline_set(p, "synth.docs_per_topic", "40") == COAUTH_OK);
  CHECK(coauth_pipeline_set(p, "lda.k", "2") == COAUTH_OK);
  CHECK(coauth_pipeline_set(p, "lda.iterations", "50") == COAUTH_OK);
  CHECK(coauth_pipeline_set(p, "min_count", "1") == COAUTH_OK);
  CHECK(coauth_pipeline_run_stage(p, "synth") == COAUTH_OK);
  CHECK(coauth_pipeline_run_stage(p, "ingest") == COAUTH_OK);
  CHECK(coauth_pipeline_run_stage(p, "train") == COAUTH_OK);
  CHECK(strcmp(coauth_last_error(), "") == 0);
  CHECK(coauth_pipeline_run_stage(p, "nonsense") != COAUTH_OK);
  CHECK(coauth_pipeline_warning(p, coauth_pipeline_warning_count(p)) == NULL);
  coauth_pipeline_destroy(p);

  coauth_model* m = NULL;
  snprintf(path, sizeof path, "%s/model.txt", dir);
  CHECK(coauth_model_load(path, &m) == COAUTH_OK);
  if (!m) return;
  CHECK(coauth_model_topics(m) == 2);
  CHECK(coauth_model_vocab_size(m) > 0);
  const char* term = NULL;
  double prob = 0;
  CHECK(coauth_model_top_word(m, 0, 0, &term, &prob) == COAUTH_OK);
  CHECK(term != NULL && prob > 0.0);
  CHECK(coauth_model_top_word(m, 5, 0, &term, &prob) == COAUTH_E_INVALID_ARGUMENT);

  double theta[2] = {0, 0};
  char text[256];
  snprintf(text, sizeof text, "%s %s %s", term, term, term);
  CHECK(coauth_model_infer_text(m, text, 9, theta, 2) == COAUTH_OK);
  CHECK(fabs(theta[0] + theta[1] - 1.0) < 1e-9);
  CHECK(theta[0] > 0.5);
  CHECK(coauth_model_infer_text(m, "", 9, theta, 2) == COAUTH_OK);
  CHECK(theta[0] == 0.5 && theta[1] == 0.5);
  CHECK(coauth_model_infer_text(m, text, 9, theta, 3) == COAUTH_E_INVALID_ARGUMENT);
  coauth_model_destroy(m);

  CHECK(coauth_model_load("/nonexistent/model.txt", &m) == COAUTH_E_IO);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    fprintf(stderr, "usage: test_capi <scratch-dir>\n");
    return 2;
  }
  CHECK(strlen(coauth_version()) > 0);
  check_names();
  check_pipeline(argv[1]);
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
