/* Exercises the shared library from plain C. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "evocorps/evocorps.h"

static int failures = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                  \
    }                                                              \
  } while (0)

static const char* kConfig =
    "{\"case\": 4, \"seed\": 5, \"horizon\": 6, \"population\": 20,"
    " \"snapshot_steps\": [1, 6]}";

static void run_once(const char* out_dir, char digest[EVC_DIGEST_HEX_LEN]) {
  evc_sim* sim = NULL;
  EXPECT(evc_sim_create(kConfig, &sim) == EVC_OK);
  if (sim == NULL) return;
  EXPECT(evc_sim_done(sim) == 0);
  EXPECT(evc_sim_step(sim) == EVC_OK);
  EXPECT(evc_sim_current_step(sim) == 1);
  EXPECT(evc_sim_run(sim) == EVC_OK);
  EXPECT(evc_sim_done(sim) == 1);
  EXPECT(evc_sim_replay_digest(sim, digest) == EVC_OK);
  EXPECT(strlen(digest) == 64);

  char* metrics = NULL;
  EXPECT(evc_sim_metrics_json(sim, &metrics) == EVC_OK);
  EXPECT(metrics != NULL && metrics[0] == '[');
  evc_free(metrics);

  char* rewards = NULL;
  EXPECT(evc_sim_rewards_json(sim, &rewards) == EVC_OK);
  EXPECT(rewards != NULL && rewards[0] == '[');
  evc_free(rewards);

  char* probe = NULL;
  EXPECT(evc_sim_probe(sim, "nobody", &probe) == EVC_ERR_NOT_FOUND);
  EXPECT(strlen(evc_last_error()) > 0);

  if (out_dir != NULL) EXPECT(evc_sim_write_outputs(sim, out_dir) == EVC_OK);
  evc_sim_destroy(sim);
}

int main(int argc, char** argv) {
  const char* out_dir = argc > 1 ? argv[1] : NULL;
  char a[EVC_DIGEST_HEX_LEN];
  char b[EVC_DIGEST_HEX_LEN];
  run_once(out_dir, a);
  run_once(NULL, b);
  EXPECT(strcmp(a, b) == 0);

  if (out_dir != NULL) {
    char path[4096];
    char from_file[EVC_DIGEST_HEX_LEN];
    snprintf(path, sizeof path, "%s/run_log.jsonl", out_dir);
    EXPECT(evc_log_file_digest(path, from_file) == EVC_OK);
    EXPECT(strcmp(a, from_file) == 0);
    EXPECT(evc_log_file_world_digest(path, from_file) == EVC_OK);
  }

  evc_sim* sim = NULL;
  EXPECT(evc_sim_create("{\"horizon\": 0}", &sim) == EVC_ERR_INVALID_CONFIG);
  EXPECT(sim == NULL);
  EXPECT(evc_sim_create("{not json", &sim) == EVC_ERR_PARSE);
  EXPECT(evc_sim_create("{\"bogus\": 1}", &sim) == EVC_ERR_INVALID_CONFIG);
  EXPECT(evc_sim_create(kConfig, NULL) == EVC_ERR_INVALID_ARGUMENT);
  EXPECT(evc_log_file_digest("/nonexistent/run_log.jsonl", a) != EVC_OK);
  EXPECT(strcmp(evc_status_string(EVC_ERR_INCOMPLETE_LOG), "incomplete_log") == 0);
  EXPECT(strlen(evc_version()) > 0);

  if (failures == 0) printf("c api: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
