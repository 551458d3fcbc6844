#include "aoed/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace aoed {

namespace {

// Mollified anchor: normalized Gaussian bump assembled like a weighted mass
// matrix (centroid quadrature). load_col receives the unit-value load.
void add_mollified_anchor(const Mesh& mesh, const Eigen::Vector2d& x0,
                          double radius, double alpha,
                          std::vector<Eigen::Triplet<double>>& trips,
                          Eigen::Ref<Vector> load_col) {
  const double s2 = radius * radius;
  double total = 0.0;
  std::vector<double> rho(mesh.n_tris());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const double r2 = (mesh.centroid(t) - x0).squaredNorm();
    rho[t] = std::exp(-0.5 * r2 / s2);
    total += rho[t] * mesh.tri_area[t];
  }
  if (total <= 0.0) throw std::runtime_error("mollified anchor has zero mass");
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const double w = alpha * rho[t] / total * mesh.tri_area[t];
    if (w == 0.0) continue;
    const auto& T = mesh.tris[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) trips.emplace_back(T[i], T[j], w / 9.0);
      load_col[T[i]] += w / 3.0;
    }
  }
}

}  // namespace

PriorModel::PriorModel(const Mesh& mesh, const PriorParams& params)
    : mesh_(&mesh), params_(params) {
  if (params_.anchors.empty())
    throw std::invalid_argument("PriorModel: at least one anchor is required");
  if (params_.anchor_values.size() != static_cast<Eigen::Index>(params_.anchors.size()))
    throw std::invalid_argument("PriorModel: anchor_values length mismatch");

  SparseOperator A = assemble_stiffness_tensor(mesh, params_.theta);
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < A.A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A.A, k); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());

  const int n_anchor = static_cast<int>(params_.anchors.size());
  anchor_loads_ = Eigen::MatrixXd::Zero(mesh.n_nodes(), n_anchor);
  if (params_.mollified) {
    for (int a = 0; a < n_anchor; ++a)
      add_mollified_anchor(mesh, params_.anchors[a], params_.mollify_radius,
                           params_.alpha, trips, anchor_loads_.col(a));
  } else {
    for (int a = 0; a < n_anchor; ++a) {
      const int n = mesh.nearest_node(params_.anchors[a]);
      trips.emplace_back(n, n, params_.alpha);
      anchor_loads_(n, a) += params_.alpha;
    }
  }
  K_.resize(mesh.n_nodes(), mesh.n_nodes());
  K_.setFromTriplets(trips.begin(), trips.end());
  K_.makeCompressed();

  mass_ = assemble_mass(mesh).A;
  lumped_ = lumped_mass(mesh);

  K_fact_.compute(K_);
  if (K_fact_.info() != Eigen::Success)
    throw std::runtime_error("PriorModel: anchored operator not factorizable");

  m_pr_ = fit_mean(params_.anchor_values);
}

Vector PriorModel::fit_mean(const Vector& anchor_values) const {
  if (anchor_values.size() != anchor_loads_.cols())
    throw std::invalid_argument("fit_mean: anchor value count mismatch");
  Vector load = anchor_loads_ * anchor_values;
  Vector m = K_fact_.solve(load);
  if ((K_ * m - load).norm() > 1e-10 * std::max(1.0, load.norm()))
    throw std::runtime_error("fit_mean: optimality system solve failed");
  return m;
}

Vector PriorModel::solve_L(const Vector& b) const { return K_fact_.solve(b); }

Vector PriorModel::apply_covariance(const Vector& v) const {
  Vector t = K_fact_.solve(lumped_.cwiseProduct(v));
  return K_fact_.solve(lumped_.cwiseProduct(t));
}

Vector PriorModel::apply_precision(const Vector& v) const {
  Vector t = (K_ * v).cwiseQuotient(lumped_);
  return (K_ * t).cwiseQuotient(lumped_);
}

Vector PriorModel::precision_dual(const Vector& v) const {
  Vector t = (K_ * v).cwiseQuotient(lumped_);
  return K_ * t;
}

Vector PriorModel::covariance_from_dual(const Vector& g) const {
  Vector t = lumped_.cwiseProduct(K_fact_.solve(g));
  return K_fact_.solve(t);
}

double PriorModel::dual_norm(const Vector& g) const {
  return std::sqrt(std::max(0.0, g.dot(covariance_from_dual(g))));
}

Vector PriorModel::sample(NormalStream& rng) const {
  Vector nu(mesh_->n_nodes());
  for (Eigen::Index i = 0; i < nu.size(); ++i) nu[i] = rng();
  Vector w = lumped_.cwiseSqrt().cwiseProduct(nu);
  return m_pr_ + K_fact_.solve(w);
}

Vector PriorModel::sample(std::uint64_t seed) const {
  NormalStream rng(seed);
  return sample(rng);
}

Eigen::MatrixXd PriorModel::dense_covariance() const {
  const int n = mesh_->n_nodes();
  Eigen::MatrixXd G(n, n);
  Vector e = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    G.col(j) = K_fact_.solve(lumped_.cwiseProduct(K_fact_.solve(e)));
    e[j] = 0.0;
  }
  return G;
}

Vector PriorModel::variance_field(int dense_threshold, int n_probe,
                                  std::uint64_t seed) const {
  const int n = mesh_->n_nodes();
  if (n <= dense_threshold) {
    Eigen::MatrixXd G = dense_covariance();
    return G.diagonal();
  }
  if (n_probe <= 0)
    throw std::runtime_error("variance_field: mesh above dense threshold and probing disabled");
  // Rademacher diagonal probing, diag(A) ~ E[z .* Az].
  NormalStream rng(seed);
  Vector num = Vector::Zero(n), den = Vector::Zero(n);
  for (int k = 0; k < n_probe; ++k) {
    Vector z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    Vector Az = K_fact_.solve(lumped_.cwiseProduct(K_fact_.solve(z)));
    num += z.cwiseProduct(Az);
    den += z.cwiseProduct(z);
  }
  return num.cwiseQuotient(den);
}

}  // namespace aoed
