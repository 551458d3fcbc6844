#pragma once

#include <Eigen/SparseCholesky>
#include <memory>
#include <optional>

#include "aoed/fem.hpp"
#include "aoed/rng.hpp"

namespace aoed {

struct PriorParams {
  Eigen::Matrix2d theta = 5e-2 * Eigen::Vector2d(0.5, 2.0).asDiagonal();
  double alpha = 1.0;
  std::vector<Eigen::Vector2d> anchors;
  Vector anchor_values;       // measured field values at the anchor points
  bool mollified = false;     // Gaussian-mollified anchors instead of nodal masses
  double mollify_radius = 0.05;
};

// Gaussian prior N(m_pr, C_pr) with C_pr = L^{-2}, L the anchored elliptic
// operator (tensor stiffness plus point masses at the anchor locations).
// Anchors remove the constant kernel, so L is SPD with natural boundary
// conditions. The discrete mass weighting uses the row-sum lumped mass
// throughout, which keeps all inverse pairs exact; prior solves are not
// forward-like and are never counted.
class PriorModel {
 public:
  PriorModel(const Mesh& mesh, const PriorParams& params);

  const Mesh& mesh() const { return *mesh_; }
  const PriorParams& params() const { return params_; }
  const Vector& mean() const { return m_pr_; }
  const Vector& lumped() const { return lumped_; }
  const SparseMat& mass() const { return mass_; }
  const SparseMat& op() const { return K_; }

  // Covariance as a map on nodal coefficients: L^{-1} Ml L^{-1} Ml v.
  Vector apply_covariance(const Vector& v) const;
  // Its inverse: Ml^{-1} L Ml^{-1} L v.
  Vector apply_precision(const Vector& v) const;
  // Dual (Galerkin) precision R = L Ml^{-1} L; this is the prior Hessian
  // block and the gradient of the prior term is R (m - m_pr).
  Vector precision_dual(const Vector& v) const;
  // R^{-1} = L^{-1} Ml L^{-1}; maps dual vectors to coefficients and doubles
  // as the CG preconditioner and the dual gradient-norm metric.
  Vector covariance_from_dual(const Vector& g) const;

  double dual_norm(const Vector& g) const;

  // m_pr + L^{-1} Ml^{1/2} nu with nu standard normal; the sample covariance
  // is exactly apply_covariance.
  Vector sample(NormalStream& rng) const;
  Vector sample(std::uint64_t seed) const;

  // Nodal prior variance diag(L^{-1} Ml L^{-1}). Dense below the node
  // threshold; otherwise a Rademacher probing estimate with n_probe vectors.
  // Throws std::runtime_error above the threshold when probing is disabled.
  Vector variance_field(int dense_threshold = 400, int n_probe = 0,
                        std::uint64_t seed = 0) const;

  // Dense coefficient covariance L^{-1} Ml L^{-1} (small meshes only).
  Eigen::MatrixXd dense_covariance() const;

  Vector solve_L(const Vector& b) const;

  // Regularized least-squares fit of point observations: the optimality
  // system is L m = alpha * (anchor load).
  Vector fit_mean(const Vector& anchor_values) const;

 private:
  const Mesh* mesh_;
  PriorParams params_;
  SparseMat K_;
  SparseMat mass_;
  Vector lumped_;
  Vector m_pr_;
  Eigen::MatrixXd anchor_loads_;  // unit-value anchor loads, one column each
  Eigen::SimplicialLDLT<SparseMat> K_fact_;
};

}  // namespace aoed
