#include "aoed/trace_est.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace aoed {

ProbeSet make_probes(const Vector& lumped_diag, int n_tr, std::uint64_t seed) {
  if (n_tr < 1) throw std::invalid_argument("make_probes: n_tr must be >= 1");
  ProbeSet ps;
  ps.seed = seed;
  ps.z.reserve(n_tr);
  const Vector inv_sqrt = lumped_diag.cwiseSqrt().cwiseInverse();
  for (int k = 0; k < n_tr; ++k) {
    NormalStream rng(substream_seed(seed, "probe", k));
    Vector nu(lumped_diag.size());
    for (Eigen::Index i = 0; i < nu.size(); ++i) nu[i] = rng();
    ps.z.push_back(inv_sqrt.cwiseProduct(nu));
  }
  return ps;
}

double estimate_trace(const LinOp& op, const ProbeSet& probes,
                      const Vector& lumped_diag) {
  if (probes.count() == 0) throw std::invalid_argument("estimate_trace: empty probe set");
  double acc = 0.0;
  for (const Vector& z : probes.z)
    acc += z.dot(lumped_diag.cwiseProduct(op(z)));
  return acc / probes.count();
}

Eigen::MatrixXd chain_neumann_laplacian(int n) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      K(i, i) += 1.0;
      K(i, i - 1) -= 1.0;
    }
    if (i + 1 < n) {
      K(i, i) += 1.0;
      K(i, i + 1) -= 1.0;
    }
  }
  return K;
}

std::vector<DeltaRow> delta_limit_check(const Eigen::MatrixXd& A,
                                        const std::vector<double>& deltas) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw std::invalid_argument("delta_limit_check: A must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain_neumann_laplacian(n));
  const Vector nu = es.eigenvalues();
  const Eigen::MatrixXd& Q = es.eigenvectors();
  // coefficients <e_i, A e_i> in the Laplacian eigenbasis
  const Vector diagQAQ = (Q.transpose() * A * Q).diagonal();
  const double trA = A.trace();

  std::vector<DeltaRow> rows;
  rows.reserve(deltas.size());
  for (double delta : deltas) {
    DeltaRow r;
    r.delta = delta;
    r.exact_trace = trA;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = 1.0 + delta * std::max(nu[i], 0.0);
      acc += diagQAQ[i] / (f * f);
    }
    r.trace_estimate = acc;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace aoed
