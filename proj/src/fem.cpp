#include "aoed/fem.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aoed {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMat from_triplets(int n, std::vector<Triplet>& trips) {
  SparseMat A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

}  // namespace

FeField::FeField(const Mesh& m, Vector c) : mesh(&m), coeffs(std::move(c)) {
  if (coeffs.size() != m.n_nodes())
    throw std::invalid_argument("FeField: coefficient length does not match mesh");
}

double symmetry_defect(const SparseMat& A) {
  SparseMat D = SparseMat(A - SparseMat(A.transpose()));
  double dmax = 0.0, amax = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SparseMat::InnerIterator it(D, k); it; ++it)
      dmax = std::max(dmax, std::abs(it.value()));
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      amax = std::max(amax, std::abs(it.value()));
  return amax > 0.0 ? dmax / amax : dmax;
}

SparseOperator assemble_mass(const Mesh& mesh) {
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.n_tris());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto& T = mesh.tris[t];
    const double a12 = mesh.tri_area[t] / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(T[i], T[j], (i == j ? 2.0 : 1.0) * a12);
  }
  SparseOperator op{from_triplets(mesh.n_nodes(), trips), true};
  return op;
}

Vector lumped_mass(const Mesh& mesh) {
  Vector d = Vector::Zero(mesh.n_nodes());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto& T = mesh.tris[t];
    const double third = mesh.tri_area[t] / 3.0;
    for (int k = 0; k < 3; ++k) d[T[k]] += third;
  }
  return d;
}

SparseOperator assemble_stiffness_expm(const Mesh& mesh, const Vector& m) {
  if (m.size() != mesh.n_nodes())
    throw std::invalid_argument("assemble_stiffness_expm: field/mesh mismatch");
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.n_tris());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const double c = std::exp(mesh.centroid_value(m, t)) * mesh.tri_area[t];
    const auto& T = mesh.tris[t];
    const auto& g = mesh.tri_grad[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(T[i], T[j], c * g[i].dot(g[j]));
  }
  return SparseOperator{from_triplets(mesh.n_nodes(), trips), true};
}

SparseOperator assemble_stiffness_tensor(const Mesh& mesh,
                                         const Eigen::Matrix2d& theta) {
  if ((theta - theta.transpose()).norm() > 1e-14 * theta.norm())
    throw std::invalid_argument("assemble_stiffness_tensor: Theta not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(theta);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("assemble_stiffness_tensor: Theta not positive definite");
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.n_tris());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto& T = mesh.tris[t];
    const auto& g = mesh.tri_grad[t];
    const double a = mesh.tri_area[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(T[i], T[j], a * g[i].dot(theta * g[j]));
  }
  return SparseOperator{from_triplets(mesh.n_nodes(), trips), true};
}

SparseMat assemble_block_C(const Mesh& mesh, const Vector& m, const Vector& u) {
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.n_tris());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const double c = std::exp(mesh.centroid_value(m, t)) * mesh.tri_area[t] / 3.0;
    const Eigen::Vector2d gu = mesh.grad_on_tri(u, t);
    const auto& T = mesh.tris[t];
    const auto& g = mesh.tri_grad[t];
    for (int r = 0; r < 3; ++r) {
      if (mesh.is_dirichlet(T[r])) continue;  // state test space is V0
      const double val = c * gu.dot(g[r]);
      for (int cc = 0; cc < 3; ++cc) trips.emplace_back(T[r], T[cc], val);
    }
  }
  return from_triplets(mesh.n_nodes(), trips);
}

SparseMat assemble_block_S(const Mesh& mesh, const Vector& m, const Vector& p) {
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.n_tris());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const double c = std::exp(mesh.centroid_value(m, t)) * mesh.tri_area[t] / 3.0;
    const Eigen::Vector2d gp = mesh.grad_on_tri(p, t);
    const auto& T = mesh.tris[t];
    const auto& g = mesh.tri_grad[t];
    for (int cc = 0; cc < 3; ++cc) {
      if (mesh.is_dirichlet(T[cc])) continue;  // state trial space is V0
      const double val = c * gp.dot(g[cc]);
      for (int r = 0; r < 3; ++r) trips.emplace_back(T[r], T[cc], val);
    }
  }
  return from_triplets(mesh.n_nodes(), trips);
}

SparseMat assemble_block_W2(const Mesh& mesh, const Vector& m, const Vector& u,
                            const Vector& p) {
  std::vector<Triplet> trips;
  trips.reserve(9 * mesh.n_tris());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const double base = std::exp(mesh.centroid_value(m, t)) * mesh.tri_area[t];
    const double val =
        base * mesh.grad_on_tri(u, t).dot(mesh.grad_on_tri(p, t)) / 9.0;
    const auto& T = mesh.tris[t];
    for (int r = 0; r < 3; ++r)
      for (int cc = 0; cc < 3; ++cc) trips.emplace_back(T[r], T[cc], val);
  }
  return from_triplets(mesh.n_nodes(), trips);
}

void restrict_to_v0(const Mesh& mesh, Vector& v) {
  for (int i = 0; i < mesh.n_nodes(); ++i)
    if (mesh.is_dirichlet(i)) v[i] = 0.0;
}

SparseOperator apply_dirichlet(const SparseOperator& op, const Mesh& mesh) {
  SparseOperator out;
  out.symmetric = op.symmetric;
  std::vector<Triplet> trips;
  trips.reserve(op.A.nonZeros());
  for (int k = 0; k < op.A.outerSize(); ++k) {
    for (SparseMat::InnerIterator it(op.A, k); it; ++it) {
      const bool rb = mesh.is_dirichlet(static_cast<int>(it.row()));
      const bool cb = mesh.is_dirichlet(static_cast<int>(it.col()));
      if (!rb && !cb) trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int i = 0; i < mesh.n_nodes(); ++i)
    if (mesh.is_dirichlet(i)) trips.emplace_back(i, i, 1.0);
  out.A = from_triplets(mesh.n_nodes(), trips);
  return out;
}

void dirichlet_rhs(const SparseMat& full_A, const Mesh& mesh,
                   const Vector& lift, Vector& b) {
  b -= full_A * lift;
  for (int i = 0; i < mesh.n_nodes(); ++i)
    if (mesh.is_dirichlet(i)) b[i] = lift[i];
}

Vector dirichlet_lift(const Mesh& mesh, double top_value, double bottom_value,
                      double well_value) {
  Vector g = Vector::Zero(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    switch (mesh.marker[i]) {
      case BoundaryMarker::DirichletTop: g[i] = top_value; break;
      case BoundaryMarker::DirichletBottom: g[i] = bottom_value; break;
      case BoundaryMarker::Well: g[i] = well_value; break;
      default: break;
    }
  }
  return g;
}

SparseMat build_observation(const Mesh& mesh,
                            const std::vector<Eigen::Vector2d>& sensors) {
  const double dx = mesh.box.width() / mesh.nx;
  const double dy = mesh.box.height() / mesh.ny;
  std::vector<Triplet> trips;
  trips.reserve(3 * sensors.size());
  for (std::size_t s = 0; s < sensors.size(); ++s) {
    const Eigen::Vector2d& p = sensors[s];
    if (!mesh.box.contains(p))
      throw std::invalid_argument("build_observation: sensor " +
                                  std::to_string(s) + " outside domain");
    int ci = static_cast<int>(std::floor((p.x() - mesh.box.x0) / dx));
    int cj = static_cast<int>(std::floor((p.y() - mesh.box.y0) / dy));
    ci = std::min(std::max(ci, 0), mesh.nx - 1);
    cj = std::min(std::max(cj, 0), mesh.ny - 1);
    const double xi = (p.x() - (mesh.box.x0 + ci * dx)) / dx;
    const double eta = (p.y() - (mesh.box.y0 + cj * dy)) / dy;
    // cell split along the (0,0)-(1,1) diagonal; lower triangle has eta <= xi
    const int t = 2 * (ci + cj * mesh.nx) + (eta <= xi ? 0 : 1);
    const auto& T = mesh.tris[t];
    double lam[3];
    if (eta <= xi) {  // (v00, v10, v11)
      lam[0] = 1.0 - xi;
      lam[1] = xi - eta;
      lam[2] = eta;
    } else {  // (v00, v11, v01)
      lam[0] = 1.0 - eta;
      lam[1] = xi;
      lam[2] = eta - xi;
    }
    for (int k = 0; k < 3; ++k) {
      const double w = std::max(lam[k], 0.0);
      if (w > 0.0) trips.emplace_back(static_cast<int>(s), T[k], w);
    }
  }
  SparseMat B(static_cast<int>(sensors.size()), mesh.n_nodes());
  B.setFromTriplets(trips.begin(), trips.end());
  B.makeCompressed();
  return B;
}

}  // namespace aoed
