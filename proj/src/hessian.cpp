#include "aoed/hessian.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace aoed {

HessianContext::HessianContext(const PriorModel& prior,
                               std::shared_ptr<const StateOperator> op,
                               const SensorArray& sensors, Vector w, Vector u,
                               Vector p, HessMode mode)
    : prior_(&prior),
      op_(std::move(op)),
      sensors_(&sensors),
      w_(std::move(w)),
      u_(std::move(u)),
      p_(std::move(p)),
      mode_(mode) {
  wsig_ = sensors_->w_sigma(w_);
}

void HessianContext::ensure_blocks() const {
  std::call_once(blocks_once_, [this] {
    const Mesh& mesh = op_->mesh();
    C_ = assemble_block_C(mesh, op_->m(), u_);
    S_ = assemble_block_S(mesh, op_->m(), p_);
    W2_ = assemble_block_W2(mesh, op_->m(), u_, p_);
  });
}

const SparseMat& HessianContext::block_C() const { ensure_blocks(); return C_; }
const SparseMat& HessianContext::block_S() const { ensure_blocks(); return S_; }
const SparseMat& HessianContext::block_W2() const { ensure_blocks(); return W2_; }

Vector HessianContext::apply_D(const Vector& x) const {
  Vector bx = sensors_->B * x;
  return sensors_->B.transpose() * wsig_.cwiseProduct(bx).eval();
}

Vector HessianContext::apply_dual(const Vector& y, Counters* counters,
                                  HessMode mode) const {
  const Mesh& mesh = op_->mesh();
  const Vector& m = op_->m();

  // incremental state: A v = -C y
  Vector cy = flux_test_vector(mesh, m, u_,
                               [&](int t) { return mesh.centroid_value(y, t); });
  restrict_to_v0(mesh, cy);
  Vector v = op_->solve_homogeneous(-cy, counters);

  // incremental adjoint: A q = -(D v + S^T y)
  Vector rhs_q = apply_D(v);
  if (mode == HessMode::Full) {
    Vector sty = flux_test_vector(
        mesh, m, p_, [&](int t) { return mesh.centroid_value(y, t); });
    restrict_to_v0(mesh, sty);
    rhs_q += sty;
  }
  Vector q = op_->solve_homogeneous(-rhs_q, counters);

  // control equation: Hy = R y + S v + W2 y + C^T q
  Vector out = prior_->precision_dual(y);
  out += load_test_vector(mesh, m, [&](int t) {
    return mesh.grad_on_tri(u_, t).dot(mesh.grad_on_tri(q, t));
  });
  if (mode == HessMode::Full) {
    out += load_test_vector(mesh, m, [&](int t) {
      return mesh.grad_on_tri(v, t).dot(mesh.grad_on_tri(p_, t));
    });
    out += load_test_vector(mesh, m, [&](int t) {
      return mesh.centroid_value(y, t) *
             mesh.grad_on_tri(u_, t).dot(mesh.grad_on_tri(p_, t));
    });
  }
  return out;
}

Vector HessianContext::apply_dual_reduced(const Vector& y, Counters* counters,
                                          HessMode mode) const {
  ensure_blocks();
  Vector v = op_->solve_homogeneous(-(C_ * y).eval(), counters);
  Vector rhs_q = apply_D(v);
  if (mode == HessMode::Full) rhs_q += S_.transpose() * y;
  Vector q = op_->solve_homogeneous(-rhs_q, counters);
  Vector out = prior_->precision_dual(y);
  out += C_.transpose() * q;
  if (mode == HessMode::Full) {
    out += S_ * v;
    out += W2_ * y;
  }
  return out;
}

CgResult HessianContext::solve(const Vector& dual_rhs, double rtol, int maxiter,
                               Counters* counters, HessMode mode,
                               NegCurvature policy) const {
  LinOp apply = [this, counters, mode](const Vector& x) {
    return apply_dual_reduced(x, counters, mode);
  };
  LinOp precond = [this](const Vector& r) {
    return prior_->covariance_from_dual(r);
  };
  if (mode == HessMode::Full && policy == NegCurvature::Error) {
    try {
      return cg_solve(apply, dual_rhs, precond, rtol, maxiter, counters,
                      CgTag::Outer, policy);
    } catch (const std::runtime_error&) {
      throw std::runtime_error(
          "hessian_solve: negative curvature (indefinite full Hessian); "
          "use Gauss-Newton mode");
    }
  }
  return cg_solve(apply, dual_rhs, precond, rtol, maxiter, counters,
                  CgTag::Outer, policy);
}

Eigen::MatrixXd HessianContext::dense(Counters* counters) const {
  const int n = op_->mesh().n_nodes();
  Eigen::MatrixXd H(n, n);
  Vector e = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    H.col(j) = apply_dual_reduced(e, counters, mode_);
    e[j] = 0.0;
  }
  return H;
}

double HessianContext::posterior_trace_dense(Counters* counters,
                                             int dense_threshold) const {
  const int n = op_->mesh().n_nodes();
  if (n > dense_threshold)
    throw std::runtime_error("posterior_trace_dense: mesh above dense threshold");
  Eigen::MatrixXd H = dense(counters);
  Eigen::LDLT<Eigen::MatrixXd> fact(H);
  if (fact.info() != Eigen::Success)
    throw std::runtime_error("posterior_trace_dense: dense factorization failed");
  Eigen::MatrixXd Hinv = fact.solve(Eigen::MatrixXd::Identity(n, n));
  return Hinv.diagonal().dot(prior_->lumped());
}

Vector HessianContext::posterior_variance_dense(Counters* counters,
                                                int dense_threshold) const {
  const int n = op_->mesh().n_nodes();
  if (n > dense_threshold)
    throw std::runtime_error("posterior_variance_dense: mesh above dense threshold");
  Eigen::MatrixXd H = dense(counters);
  Eigen::LDLT<Eigen::MatrixXd> fact(H);
  Eigen::MatrixXd Hinv = fact.solve(Eigen::MatrixXd::Identity(n, n));
  return Hinv.diagonal();
}

}  // namespace aoed
