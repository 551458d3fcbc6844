/* C interface to the sensor-placement library. All functionality is reached
 * through an opaque session handle created from a configuration file or
 * string; runs write their CSV/VTK outputs into a caller-chosen directory.
 * Every call returns an aoed_status; a human-readable message for the last
 * failure is kept on the session. */
#ifndef AOED_H
#define AOED_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aoed_status {
  AOED_OK = 0,
  AOED_ERR_INVALID_ARGUMENT = 1,
  AOED_ERR_CONFIG = 2,
  AOED_ERR_IO = 3,
  AOED_ERR_SOLVER = 4,
  AOED_ERR_INTERNAL = 5
} aoed_status;

typedef struct aoed_session aoed_session;

const char* aoed_version(void);
const char* aoed_status_string(aoed_status status);

aoed_status aoed_session_open(const char* config_path, aoed_session** out);
aoed_status aoed_session_open_text(const char* config_text, aoed_session** out);
void aoed_session_close(aoed_session* session);

/* Message describing the most recent failure on this session. */
const char* aoed_session_last_error(const aoed_session* session);

/* Configuration override, e.g. aoed_session_set(s, "mesh.nx", "45"). */
aoed_status aoed_session_set(aoed_session* session, const char* key,
                             const char* value);

/* Experiment drivers; out_dir is created if missing. */
aoed_status aoed_run_forward(aoed_session* session, const char* out_dir);
aoed_status aoed_run_map(aoed_session* session, const char* out_dir);
aoed_status aoed_run_oed_eval(aoed_session* session, const char* out_dir);
aoed_status aoed_run_oed_solve(aoed_session* session, const char* out_dir);
aoed_status aoed_run_compare_designs(aoed_session* session, const char* out_dir);
/* sweep: "param" or "sensor" */
aoed_status aoed_run_scaling_study(aoed_session* session, const char* sweep,
                                   const char* out_dir);
/* n_failed receives the number of failed checks (may be NULL). */
aoed_status aoed_run_gradcheck(aoed_session* session, const char* out_dir,
                               int* n_failed);
aoed_status aoed_run_delta_check(aoed_session* session, const char* out_dir);

/* Objective value recorded by the last oed-eval run on this session. */
aoed_status aoed_last_objective(const aoed_session* session, double* psi);

/* Ledger of the last run: forward_like, inner_cg, outer_cg, newton, oed_iters. */
aoed_status aoed_last_counters(const aoed_session* session, long long out[5]);

#ifdef __cplusplus
}
#endif

#endif /* AOED_H */
