#pragma once

#include "aoed/map_solver.hpp"
#include "aoed/trace_est.hpp"

namespace aoed {

struct OedOptions {
  HessMode mode = HessMode::GaussNewton;
  MapOptions map;
  double hess_rtol = 1e-8;
  int hess_maxiter = 2000;
  int threads = 0;  // 0: AOED_THREADS or hardware
  // Test hook: negates the trace-estimator term of the design gradient so the
  // finite-difference suite can demonstrate that it catches sign mutations.
  bool debug_negate_vterm = false;
};

struct OedEval {
  double psi = 0.0;
  Vector grad;           // empty unless requested
  bool reliable = true;  // false if any MAP solve failed to converge
  std::vector<MapSolution> map;
  // retained per (i,k): trace solutions and, after a gradient, the
  // incremental pairs
  std::vector<std::vector<Vector>> y, v, q;
  CounterSnapshot cost;
};

// The design objective: average over data samples of the randomized-trace
// estimate of the posterior covariance at the per-sample MAP point, with the
// adjoint design gradient. Samples, probes, and all seeds stay frozen across
// an enclosing optimization so the objective is a smooth deterministic
// function of the weights; MAP solves warm-start from the previous design.
class OedProblem {
 public:
  OedProblem(const PriorModel& prior, const Scenario& scen,
             const SensorArray& sensors, std::vector<DataSample> samples,
             ProbeSet probes, OedOptions opts, Counters& counters);

  OedEval evaluate(const Vector& w, bool want_grad);

  // Expected performance of a design over fresh data samples: average
  // posterior trace V and average relative MAP error E vs the generating
  // draws. MAP solves are cold.
  struct Performance {
    double v_bar = 0.0;
    double e_bar = 0.0;
  };
  Performance expected_performance(const Vector& w,
                                   const std::vector<DataSample>& fresh);

  const PriorModel& prior() const { return *prior_; }
  const Scenario& scenario() const { return scen_; }
  const SensorArray& sensors() const { return *sensors_; }
  const std::vector<DataSample>& samples() const { return samples_; }
  const ProbeSet& probes() const { return probes_; }
  const OedOptions& options() const { return opts_; }
  Counters& counters() { return *counters_; }
  int n_sensors() const { return sensors_->count(); }

  void reset_warm_starts();

 private:
  const PriorModel* prior_;
  Scenario scen_;
  const SensorArray* sensors_;
  std::vector<DataSample> samples_;
  ProbeSet probes_;
  OedOptions opts_;
  Counters* counters_;

  struct Slot {
    Vector m_warm;
    double g0_ref = -1.0;
  };
  std::vector<Slot> slots_;
};

// Verifies the relations between the design-adjoint variables and the trace
// intermediates: solving the Hessian system with right-hand side
// -(1/(n_d n_tr)) Ml z must reproduce (-v, -y, -q)/(n_d n_tr). Returns the
// maximum relative error over the three fields.
double adjoint_identity_error(const HessianContext& ctx, const Vector& z,
                              int n_d, int n_tr, double rtol,
                              Counters* counters);

}  // namespace aoed
