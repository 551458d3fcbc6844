#include "aoed/krylov.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aoed {

CgResult cg_solve(const LinOp& apply_A, const Vector& b, const LinOp& precond,
                  double rtol, int maxiter, Counters* counters, CgTag tag,
                  NegCurvature policy,
                  const std::function<void(int, const Vector&)>& on_iterate) {
  CgResult res;
  const double bnorm = b.norm();
  res.x = Vector::Zero(b.size());
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  Vector r = b;
  Vector z = precond ? precond(r) : r;
  Vector p = z;
  double rz = r.dot(z);
  const double tol = rtol * bnorm;
  for (int it = 0; it < maxiter; ++it) {
    Vector Ap = apply_A(p);
    const double pAp = p.dot(Ap);
    if (pAp <= 0.0) {
      res.breakdown = true;
      res.breakdown_iter = it;
      if (policy == NegCurvature::Error)
        throw std::runtime_error(
            "cg_solve: negative curvature at iteration " + std::to_string(it) +
            "; operator is not positive definite");
      if (it == 0) res.x = z;  // fall back to the preconditioned residual
      res.rel_residual = r.norm() / bnorm;
      return res;
    }
    const double alpha = rz / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    res.iters = it + 1;
    if (counters) {
      if (tag == CgTag::Inner) counters->add_inner_cg(1);
      if (tag == CgTag::Outer) counters->add_outer_cg(1);
    }
    if (on_iterate) on_iterate(it + 1, res.x);
    if (r.norm() <= tol) {
      res.converged = true;
      break;
    }
    z = precond ? precond(r) : r;
    const double rz_new = r.dot(z);
    const double beta = rz_new / rz;
    rz = rz_new;
    p = z + beta * p;
  }
  res.rel_residual = r.norm() / bnorm;
  return res;
}

Vector sparse_direct_solve(const SparseOperator& A, const Vector& b,
                           Counters* counters) {
  Vector x;
  if (A.symmetric) {
    Eigen::SimplicialLDLT<SparseMat> fact(A.A);
    if (fact.info() != Eigen::Success)
      throw std::runtime_error("sparse_direct_solve: factorization failed");
    x = fact.solve(b);
  } else {
    Eigen::SparseLU<SparseMat> fact(A.A);
    if (fact.info() != Eigen::Success)
      throw std::runtime_error("sparse_direct_solve: factorization failed");
    x = fact.solve(b);
  }
  const double bn = b.norm();
  if (bn > 0.0 && (A.A * x - b).norm() > 1e-10 * bn)
    throw std::runtime_error("sparse_direct_solve: singular or ill-conditioned system");
  if (counters) counters->add_forward_like(1);
  return x;
}

Vector lumped_mass_sqrt_apply(const Vector& lumped_diag, const Vector& v,
                              bool inverse) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double d = lumped_diag[i];
    if (!(d > 0.0))
      throw std::logic_error("lumped_mass_sqrt_apply: nonpositive lumped entry");
    const double s = std::sqrt(d);
    out[i] = inverse ? v[i] / s : v[i] * s;
  }
  return out;
}

}  // namespace aoed
