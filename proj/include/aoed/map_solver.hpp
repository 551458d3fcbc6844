#pragma once

#include "aoed/hessian.hpp"

namespace aoed {

struct MapOptions {
  double rtol = 1e-8;
  double atol = 1e-11;
  int max_newton = 50;
  int gn_iters = 5;  // Gauss-Newton steps before switching to full Newton
  HessMode late_mode = HessMode::Full;
  double forcing_cap = 0.5;  // Eisenstat-Walker cap
  int cg_maxiter = 1000;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 25;
  // Reference gradient norm for the relative stopping test. Warm-started
  // solves pass the value recorded at the first cold solve so repeated
  // evaluations terminate at a consistent tolerance.
  double g0_ref = -1.0;
};

struct MapSolution {
  Vector m, u, p;
  std::shared_ptr<const StateOperator> op;  // factorization at m
  double cost = 0.0;
  double grad_norm = 0.0;
  double g0_ref = 0.0;
  int newton_iters = 0;
  long inner_cg_iters = 0;
  bool converged = false;
  std::vector<double> cost_history;
};

// J(m, w; d) = 1/2 (Bu-d)^T Wsig (Bu-d) + 1/2 |L(m-m_pr)|^2, the second term
// in the lumped-mass norm. One state solve.
double eval_cost(const PriorModel& prior, const Scenario& scen,
                 const SensorArray& sensors, const Vector& w, const Vector& d,
                 const Vector& m, Counters* counters);

// Adjoint gradient of J: R(m - m_pr) + <mt e^m grad u, grad p>. Exactly one
// state and one adjoint solve. Outputs u and p when requested.
Vector eval_map_gradient(const PriorModel& prior, const Scenario& scen,
                         const SensorArray& sensors, const Vector& w,
                         const Vector& d, const Vector& m, Counters* counters,
                         Vector* u_out = nullptr, Vector* p_out = nullptr);

// Inexact Newton-CG with Armijo backtracking for the inner problem
// min_m J(m, w; d). Converged when the prior-metric dual norm of the gradient
// drops below max(atol, rtol * g0).
MapSolution solve_map(const PriorModel& prior, const Scenario& scen,
                      const SensorArray& sensors, const Vector& w,
                      const Vector& d, const Vector& m_init,
                      const MapOptions& opts, Counters* counters);

// |m - m_ref|_M / |m_ref|_M in the consistent-mass L2 norm.
double relative_error(const SparseMat& mass, const Vector& m,
                      const Vector& m_ref);

}  // namespace aoed
