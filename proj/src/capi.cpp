#include "aoed/aoed.h"

#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "aoed/drivers.hpp"

struct aoed_session {
  aoed::ExperimentConfig cfg;
  std::string last_error;
  std::optional<double> last_psi;
  aoed::CounterSnapshot last_counters;
};

namespace {

const char* kVersion = "0.1.0";

aoed_status fail(aoed_session* s, aoed_status code, const std::string& msg) {
  if (s) s->last_error = msg;
  return code;
}

template <typename Fn>
aoed_status guarded(aoed_session* s, Fn&& fn) {
  if (!s) return AOED_ERR_INVALID_ARGUMENT;
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(s, AOED_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::runtime_error& e) {
    return fail(s, AOED_ERR_SOLVER, e.what());
  } catch (const std::bad_alloc&) {
    return fail(s, AOED_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(s, AOED_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* aoed_version(void) { return kVersion; }

const char* aoed_status_string(aoed_status status) {
  switch (status) {
    case AOED_OK: return "ok";
    case AOED_ERR_INVALID_ARGUMENT: return "invalid argument";
    case AOED_ERR_CONFIG: return "configuration error";
    case AOED_ERR_IO: return "i/o error";
    case AOED_ERR_SOLVER: return "solver error";
    case AOED_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

aoed_status aoed_session_open(const char* config_path, aoed_session** out) {
  if (!out) return AOED_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  auto* s = new (std::nothrow) aoed_session;
  if (!s) return AOED_ERR_INTERNAL;
  try {
    if (config_path && std::strlen(config_path) > 0)
      s->cfg = aoed::ExperimentConfig::from_file(config_path);
    *out = s;
    return AOED_OK;
  } catch (const std::exception& e) {
    delete s;
    (void)e;
    return AOED_ERR_CONFIG;
  }
}

aoed_status aoed_session_open_text(const char* config_text, aoed_session** out) {
  if (!out) return AOED_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  auto* s = new (std::nothrow) aoed_session;
  if (!s) return AOED_ERR_INTERNAL;
  try {
    if (config_text) s->cfg = aoed::ExperimentConfig::from_string(config_text);
    *out = s;
    return AOED_OK;
  } catch (const std::exception& e) {
    delete s;
    (void)e;
    return AOED_ERR_CONFIG;
  }
}

void aoed_session_close(aoed_session* session) { delete session; }

const char* aoed_session_last_error(const aoed_session* session) {
  return session ? session->last_error.c_str() : "";
}

aoed_status aoed_session_set(aoed_session* session, const char* key,
                             const char* value) {
  if (!session || !key || !value) return AOED_ERR_INVALID_ARGUMENT;
  session->cfg.set(key, value);
  return AOED_OK;
}

aoed_status aoed_run_forward(aoed_session* s, const char* out_dir) {
  if (!out_dir) return AOED_ERR_INVALID_ARGUMENT;
  return guarded(s, [&] {
    aoed::run_forward(s->cfg, out_dir);
    return AOED_OK;
  });
}

aoed_status aoed_run_map(aoed_session* s, const char* out_dir) {
  if (!out_dir) return AOED_ERR_INVALID_ARGUMENT;
  return guarded(s, [&] {
    aoed::MapResult r = aoed::run_map(s->cfg, out_dir);
    if (!r.converged) return fail(s, AOED_ERR_SOLVER, "MAP solve did not converge");
    return AOED_OK;
  });
}

aoed_status aoed_run_oed_eval(aoed_session* s, const char* out_dir) {
  if (!out_dir) return AOED_ERR_INVALID_ARGUMENT;
  return guarded(s, [&] {
    aoed::OedEvalResult r = aoed::run_oed_eval(s->cfg, out_dir);
    s->last_psi = r.psi;
    s->last_counters = r.cost;
    if (!r.reliable)
      return fail(s, AOED_ERR_SOLVER, "objective flagged unreliable (MAP non-convergence)");
    return AOED_OK;
  });
}

aoed_status aoed_run_oed_solve(aoed_session* s, const char* out_dir) {
  if (!out_dir) return AOED_ERR_INVALID_ARGUMENT;
  return guarded(s, [&] {
    aoed::run_oed_solve(s->cfg, out_dir);
    return AOED_OK;
  });
}

aoed_status aoed_run_compare_designs(aoed_session* s, const char* out_dir) {
  if (!out_dir) return AOED_ERR_INVALID_ARGUMENT;
  return guarded(s, [&] {
    aoed::run_compare_designs(s->cfg, out_dir);
    return AOED_OK;
  });
}

aoed_status aoed_run_scaling_study(aoed_session* s, const char* sweep,
                                   const char* out_dir) {
  if (!sweep || !out_dir) return AOED_ERR_INVALID_ARGUMENT;
  const std::string sw(sweep);
  if (sw != "param" && sw != "sensor")
    return fail(s, AOED_ERR_INVALID_ARGUMENT, "sweep must be 'param' or 'sensor'");
  return guarded(s, [&] {
    aoed::run_scaling_study(s->cfg,
                            sw == "param" ? aoed::ScalingSweep::ParamDim
                                          : aoed::ScalingSweep::SensorDim,
                            out_dir);
    return AOED_OK;
  });
}

aoed_status aoed_run_gradcheck(aoed_session* s, const char* out_dir,
                               int* n_failed) {
  if (!out_dir) return AOED_ERR_INVALID_ARGUMENT;
  return guarded(s, [&] {
    aoed::GradcheckResult r = aoed::run_gradcheck(s->cfg, out_dir);
    if (n_failed) *n_failed = r.n_failed;
    if (r.n_failed > 0)
      return fail(s, AOED_ERR_SOLVER,
                  std::to_string(r.n_failed) + " gradient checks failed");
    return AOED_OK;
  });
}

aoed_status aoed_run_delta_check(aoed_session* s, const char* out_dir) {
  if (!out_dir) return AOED_ERR_INVALID_ARGUMENT;
  return guarded(s, [&] {
    aoed::run_delta_check(s->cfg, out_dir);
    return AOED_OK;
  });
}

aoed_status aoed_last_objective(const aoed_session* s, double* psi) {
  if (!s || !psi) return AOED_ERR_INVALID_ARGUMENT;
  if (!s->last_psi) return AOED_ERR_INVALID_ARGUMENT;
  *psi = *s->last_psi;
  return AOED_OK;
}

aoed_status aoed_last_counters(const aoed_session* s, long long out[5]) {
  if (!s || !out) return AOED_ERR_INVALID_ARGUMENT;
  out[0] = s->last_counters.forward_like;
  out[1] = s->last_counters.inner_cg;
  out[2] = s->last_counters.outer_cg;
  out[3] = s->last_counters.newton;
  out[4] = s->last_counters.oed_iters;
  return AOED_OK;
}

}  // extern "C"
