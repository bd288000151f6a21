#ifndef EVOCORPS_H
#define EVOCORPS_H

/* C interface to the simulation engine. All strings are UTF-8. Strings
 * returned through `char**` are owned by the caller and released with
 * evc_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EVC_API __declspec(dllexport)
#else
#define EVC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evc_status {
  EVC_OK = 0,
  EVC_ERR_INVALID_CONFIG = 1,
  EVC_ERR_INVALID_ARGUMENT = 2,
  EVC_ERR_NOT_FOUND = 3,
  EVC_ERR_DUPLICATE = 4,
  EVC_ERR_PARSE = 5,
  EVC_ERR_IO = 6,
  EVC_ERR_BACKEND = 7,
  EVC_ERR_INCOMPLETE_LOG = 8,
  EVC_ERR_INTERNAL = 99
} evc_status;

typedef struct evc_sim evc_sim;

#define EVC_DIGEST_HEX_LEN 65 /* 64 hex chars + NUL */

EVC_API const char* evc_version(void);

/* Message of the last failed call on this thread; "" when none. */
EVC_API const char* evc_last_error(void);

EVC_API const char* evc_status_string(evc_status status);

EVC_API void evc_free(void* p);

/* `config_json` is a JSON object with ScenarioConfig keys (see README);
 * NULL or "" uses the defaults. */
EVC_API evc_status evc_sim_create(const char* config_json, evc_sim** out);
EVC_API void evc_sim_destroy(evc_sim* sim);

/* One round. EVC_ERR_INVALID_ARGUMENT once the horizon is reached. */
EVC_API evc_status evc_sim_step(evc_sim* sim);

/* Remaining rounds. A backend failure ends the run early with
 * EVC_ERR_BACKEND and leaves the log incomplete. */
EVC_API evc_status evc_sim_run(evc_sim* sim);

EVC_API int evc_sim_done(const evc_sim* sim);
EVC_API int evc_sim_current_step(const evc_sim* sim);

/* Writes run_log.jsonl, per-post comments.jsonl, metrics.csv, reward.csv
 * and probes.jsonl under `out_dir`. Requires a finished run. */
EVC_API evc_status evc_sim_write_outputs(evc_sim* sim, const char* out_dir);

EVC_API evc_status evc_sim_world_digest(const evc_sim* sim, char out[EVC_DIGEST_HEX_LEN]);
EVC_API evc_status evc_sim_replay_digest(const evc_sim* sim, char out[EVC_DIGEST_HEX_LEN]);

EVC_API evc_status evc_sim_log_jsonl(const evc_sim* sim, char** out);

/* Snapshot metrics as a JSON array. */
EVC_API evc_status evc_sim_metrics_json(evc_sim* sim, char** out);

/* Per-round rewards as a JSON array of numbers. */
EVC_API evc_status evc_sim_rewards_json(const evc_sim* sim, char** out);

/* Reaction of one user to the fixed stimulus as JSON. Changes no state. */
EVC_API evc_status evc_sim_probe(const evc_sim* sim, const char* user_id, char** out);

/* Digest of a run_log.jsonl file; EVC_ERR_INCOMPLETE_LOG for aborted runs. */
EVC_API evc_status evc_log_file_digest(const char* path, char out[EVC_DIGEST_HEX_LEN]);

/* Digest of the world rebuilt from a run_log.jsonl file. */
EVC_API evc_status evc_log_file_world_digest(const char* path, char out[EVC_DIGEST_HEX_LEN]);

#ifdef __cplusplus
}
#endif

#endif
