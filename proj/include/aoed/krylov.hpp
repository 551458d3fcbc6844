#pragma once

#include <functional>

#include "aoed/counters.hpp"
#include "aoed/fem.hpp"

namespace aoed {

using LinOp = std::function<Vector(const Vector&)>;

enum class NegCurvature {
  Error,     // throw; signals an indefinite Hessian
  Truncate,  // stop and return the current iterate (Newton-CG truncation)
};

struct CgResult {
  Vector x;
  int iters = 0;
  bool converged = false;
  bool breakdown = false;
  int breakdown_iter = -1;
  double rel_residual = 0.0;
};

// Preconditioned CG for an SPD operator given by its action. The
// preconditioner action must approximate A^{-1}. Iterations are logged to the
// counter ledger under the given tag. On a negative-curvature direction the
// behavior follows `policy`; with Truncate and no iterate accepted yet, the
// preconditioned residual direction is returned.
CgResult cg_solve(const LinOp& apply_A, const Vector& b, const LinOp& precond,
                  double rtol, int maxiter, Counters* counters, CgTag tag,
                  NegCurvature policy = NegCurvature::Error,
                  const std::function<void(int, const Vector&)>& on_iterate = {});

// Direct sparse solve (LDLT for symmetric operators, LU otherwise). Each call
// optionally increments the forward-like ledger; pass nullptr for solves that
// are not forward-like (prior, mass). Throws std::runtime_error on singular
// systems or residuals above 1e-10 relative.
Vector sparse_direct_solve(const SparseOperator& A, const Vector& b,
                           Counters* counters = nullptr);

// Action of the lumped-mass square root (inverse = true applies Ml^{-1/2}).
Vector lumped_mass_sqrt_apply(const Vector& lumped_diag, const Vector& v,
                              bool inverse);

}  // namespace aoed
