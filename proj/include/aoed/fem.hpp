#pragma once

#include <Eigen/Sparse>

#include "aoed/mesh.hpp"

namespace aoed {

using SparseMat = Eigen::SparseMatrix<double>;

struct SparseOperator {
  SparseMat A;
  bool symmetric = false;

  int rows() const { return static_cast<int>(A.rows()); }
  int cols() const { return static_cast<int>(A.cols()); }
};

// max_ij |A - A^T| relative to max_ij |A|.
double symmetry_defect(const SparseMat& A);

// Nodal coefficient function on a mesh.
struct FeField {
  const Mesh* mesh = nullptr;
  Vector coeffs;

  FeField() = default;
  FeField(const Mesh& m, Vector c);
  int size() const { return static_cast<int>(coeffs.size()); }
};

// Consistent P1 mass matrix; entry sum equals the domain area.
SparseOperator assemble_mass(const Mesh& mesh);

// Row-sum lumped mass diagonal.
Vector lumped_mass(const Mesh& mesh);

// Stiffness with scalar coefficient exp(m), m interpolated at element
// centroids (one-point quadrature). Keeping the whole chain of derivative
// blocks on the same rule makes them exact derivatives of this operator.
SparseOperator assemble_stiffness_expm(const Mesh& mesh, const Vector& m);

// Stiffness with constant SPD tensor coefficient Theta.
// Throws std::invalid_argument if Theta is not symmetric positive definite.
SparseOperator assemble_stiffness_tensor(const Mesh& mesh,
                                         const Eigen::Matrix2d& theta);

// Coupling blocks of the Hessian system, all on centroid quadrature and
// evaluated at a linearization point (m, u, p). Test/trial sides that live in
// the homogeneous state space have their Dirichlet rows/columns zeroed.
//
//   C[r,c]  = <phi_c e^m grad u, grad phi_r>,  rows in V0 (state tests)
//   S[r,c]  = <phi_r e^m grad phi_c, grad p>,  cols in V0 (state trials)
//   W2[r,c] = <phi_r phi_c e^m grad u, grad p>
SparseMat assemble_block_C(const Mesh& mesh, const Vector& m, const Vector& u);
SparseMat assemble_block_S(const Mesh& mesh, const Vector& m, const Vector& p);
SparseMat assemble_block_W2(const Mesh& mesh, const Vector& m, const Vector& u,
                            const Vector& p);

// Element-loop products with the same quadrature, used by the matrix-free
// Hessian route and the outer-adjoint right-hand sides.
//
//   flux_test:  out_r += sum_e exp(mbar) area weight_e (grad a_e . grad phi_r)
//   load_test:  out_r += sum_e exp(mbar) area weight_e / 3
// weight_e is any per-element scalar supplied by the callback.
template <typename WeightFn>
Vector flux_test_vector(const Mesh& mesh, const Vector& m, const Vector& a,
                        WeightFn&& weight) {
  Vector out = Vector::Zero(mesh.n_nodes());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const double c =
        std::exp(mesh.centroid_value(m, t)) * mesh.tri_area[t] * weight(t);
    if (c == 0.0) continue;
    const Eigen::Vector2d ga = mesh.grad_on_tri(a, t);
    const auto& T = mesh.tris[t];
    const auto& g = mesh.tri_grad[t];
    for (int k = 0; k < 3; ++k) out[T[k]] += c * ga.dot(g[k]);
  }
  return out;
}

template <typename WeightFn>
Vector load_test_vector(const Mesh& mesh, const Vector& m, WeightFn&& weight) {
  Vector out = Vector::Zero(mesh.n_nodes());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const double c =
        std::exp(mesh.centroid_value(m, t)) * mesh.tri_area[t] * weight(t) / 3.0;
    if (c == 0.0) continue;
    const auto& T = mesh.tris[t];
    for (int k = 0; k < 3; ++k) out[T[k]] += c;
  }
  return out;
}

// Zeroes the entries of a dual vector at Dirichlet nodes (restriction to V0).
void restrict_to_v0(const Mesh& mesh, Vector& v);

// Symmetric elimination of Dirichlet rows/columns: zero them and put 1 on the
// diagonal. Preserves the symmetry flag.
SparseOperator apply_dirichlet(const SparseOperator& op, const Mesh& mesh);

// b <- b - A*lift at free nodes; b <- lift at Dirichlet nodes. Used together
// with apply_dirichlet so the constrained solve returns the full field.
void dirichlet_rhs(const SparseMat& full_A, const Mesh& mesh,
                   const Vector& lift, Vector& b);

// Nodal vector holding boundary values at Dirichlet nodes, zero elsewhere.
Vector dirichlet_lift(const Mesh& mesh, double top_value, double bottom_value,
                      double well_value = 0.0);

// Pointwise observation operator: row j carries the P1 interpolation weights
// of sensor j; rows sum to one. Throws std::invalid_argument naming the
// sensor if a point lies outside the domain closure.
SparseMat build_observation(const Mesh& mesh,
                            const std::vector<Eigen::Vector2d>& sensors);

}  // namespace aoed
