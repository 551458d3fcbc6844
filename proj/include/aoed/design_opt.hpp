#pragma once

#include "aoed/oed.hpp"

namespace aoed {

enum class PenaltyFamily { L1, EpsFamily };

// Sparsifying penalty. L1 is sum(w). The epsilon family sums
// f_eps(t) = t / (t + eps), which is concave, monotone, and approaches the
// support count pointwise as eps -> 0.
struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::L1;
  double eps = 0.0;
};

struct PenaltyEval {
  double value = 0.0;
  Vector grad;
};

PenaltyEval penalty_eval(const Vector& w, const PenaltySpec& spec);

struct OuterOptions {
  double gamma = 0.008;
  std::vector<double> eps_schedule{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::vector<double> mu_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double stage_tol = 1e-5;   // relative projected gradient of psi + gamma P
  int stage_max_iters = 100; // quasi-Newton budget per continuation stage
  int lbfgs_mem = 20;
  double active_threshold = 1e-2;
  double boundary_fraction = 0.995;  // fraction-to-boundary step cap
  Vector w0;                         // default: 0.5 everywhere
  // iterate-history hook: (stage, family, eps, iter, mu, phi, psi, penalty,
  // relative projected gradient)
  std::function<void(int, PenaltyFamily, double, int, double, double, double,
                     double, double)>
      on_iteration;
};

struct StageRecord {
  int stage = 0;
  PenaltyFamily family = PenaltyFamily::L1;
  double eps = 0.0;
  int iters = 0;
  double psi = 0.0;
  double penalty_value = 0.0;
  double proj_grad_rel = 0.0;
  int n_active = 0;
  bool converged = false;
  Vector w;
};

struct OuterSolveRecord {
  Vector w_final;   // raw continuation result, strictly inside (0,1)
  Vector w_binary;  // rounded after the final stage
  int n_active = 0;
  bool all_stages_converged = true;
  std::vector<StageRecord> stages;
  CounterSnapshot cost;
};

// Interior-point solve of min_w psi(w) + gamma P(w) over [0,1]^{n_s}: primal
// log-barrier with a decreasing mu schedule, limited-memory BFGS inside, and
// penalty continuation L1 -> P_eps per the schedule. Each continuation stage
// starts from the previous stage's iterate.
OuterSolveRecord solve_outer(OedProblem& problem, const OuterOptions& opts);

int count_active(const Vector& w, double threshold = 1e-2);

// Uniformly sampled n_active-subsets as binary weight vectors, deterministic
// per seed; designs are indexed so draws are order-independent.
std::vector<Vector> random_designs(int n_w, int n_active, int n_s,
                                   std::uint64_t seed);

}  // namespace aoed
