#pragma once

#include <memory>
#include <mutex>

#include "aoed/forward.hpp"
#include "aoed/krylov.hpp"
#include "aoed/prior.hpp"

namespace aoed {

enum class HessMode { GaussNewton, Full };

// Hessian of the regularized misfit at a linearization point (m, u, p). The
// operator maps parameter fields to dual vectors; one application costs
// exactly two forward-like solves. Two independent routes are provided: a
// matrix-free element-loop route following the incremental equations in
// solve order, and a block route using the assembled coupling matrices and
// the reduced form C^T A^{-1}(D A^{-1} C - S^T) - S A^{-1} C + Q.
// Gauss-Newton drops every term carrying the adjoint p.
class HessianContext {
 public:
  HessianContext(const PriorModel& prior,
                 std::shared_ptr<const StateOperator> op,
                 const SensorArray& sensors, Vector w, Vector u, Vector p,
                 HessMode mode);

  const PriorModel& prior() const { return *prior_; }
  const StateOperator& op() const { return *op_; }
  const SensorArray& sensors() const { return *sensors_; }
  const Vector& u() const { return u_; }
  const Vector& p() const { return p_; }
  const Vector& w() const { return w_; }
  const Vector& w_sigma() const { return wsig_; }
  HessMode mode() const { return mode_; }

  // Sequential route: incremental state solve, incremental adjoint solve,
  // then the control equation, all via element loops.
  Vector apply_dual(const Vector& y, Counters* counters) const {
    return apply_dual(y, counters, mode_);
  }
  Vector apply_dual(const Vector& y, Counters* counters, HessMode mode) const;

  // Block-elimination route on the assembled matrices.
  Vector apply_dual_reduced(const Vector& y, Counters* counters) const {
    return apply_dual_reduced(y, counters, mode_);
  }
  Vector apply_dual_reduced(const Vector& y, Counters* counters,
                            HessMode mode) const;

  // Prior-preconditioned CG on the dual system H y = rhs. Negative curvature
  // in Full mode reports an indefinite Hessian unless `truncate` is set.
  CgResult solve(const Vector& dual_rhs, double rtol, int maxiter,
                 Counters* counters,
                 NegCurvature policy = NegCurvature::Error) const {
    return solve(dual_rhs, rtol, maxiter, counters, mode_, policy);
  }
  CgResult solve(const Vector& dual_rhs, double rtol, int maxiter,
                 Counters* counters, HessMode mode, NegCurvature policy) const;

  // Assembled blocks at the linearization point (memoized, single-writer).
  const SparseMat& block_C() const;
  const SparseMat& block_S() const;
  const SparseMat& block_W2() const;

  Vector apply_D(const Vector& x) const;  // B^T Wsig B x

  // Dense H for oracle use on coarse meshes (2n forward-like solves).
  Eigen::MatrixXd dense(Counters* counters) const;

  // Exact mass-weighted trace of H^{-1} on coarse meshes: tr(H^{-1} Ml).
  // Throws std::runtime_error above the node threshold.
  double posterior_trace_dense(Counters* counters,
                               int dense_threshold = 400) const;

  // Nodal posterior variance diag(H^{-1}); dense route only.
  Vector posterior_variance_dense(Counters* counters,
                                  int dense_threshold = 400) const;

 private:
  const PriorModel* prior_;
  std::shared_ptr<const StateOperator> op_;
  const SensorArray* sensors_;
  Vector w_, wsig_, u_, p_;
  HessMode mode_;

  mutable std::once_flag blocks_once_;
  mutable SparseMat C_, S_, W2_;
  void ensure_blocks() const;
};

}  // namespace aoed
