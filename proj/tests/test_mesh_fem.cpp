#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "aoed/fem.hpp"
#include "aoed/rng.hpp"
#include "aoed/vtk_io.hpp"

using namespace aoed;

namespace {

Eigen::MatrixXd dense(const SparseMat& A) { return Eigen::MatrixXd(A); }

// independent per-element assembly of the exp(m) stiffness, straight from the
// vertex coordinates
Eigen::MatrixXd dense_expm_stiffness_oracle(const Mesh& mesh, const Vector& m) {
  const int n = mesh.n_nodes();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const auto& T = mesh.tris[t];
    const Eigen::Vector2d a = mesh.nodes[T[0]], b = mesh.nodes[T[1]],
                          c = mesh.nodes[T[2]];
    const double two_area =
        (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    const double area = 0.5 * two_area;
    Eigen::Matrix<double, 2, 3> G;
    G.col(0) << b.y() - c.y(), c.x() - b.x();
    G.col(1) << c.y() - a.y(), a.x() - c.x();
    G.col(2) << a.y() - b.y(), b.x() - a.x();
    G /= two_area;
    const double coeff = std::exp((m[T[0]] + m[T[1]] + m[T[2]]) / 3.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        A(T[i], T[j]) += coeff * area * G.col(i).dot(G.col(j));
  }
  return A;
}

Vector random_field(const Mesh& mesh, std::uint64_t seed) {
  NormalStream rng(seed);
  Vector v(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) v[i] = rng();
  return v;
}

}  // namespace

TEST_CASE("rect mesh basic counts and areas") {
  Mesh m1 = build_rect_mesh(1, 1);
  CHECK(m1.n_nodes() == 4);
  CHECK(m1.n_tris() == 2);
  double area = 0.0;
  for (double a : m1.tri_area) {
    CHECK(a > 0.0);
    area += a;
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));

  Mesh m10 = build_rect_mesh(10, 10);
  CHECK(m10.n_nodes() == 121);
  CHECK(m10.n_tris() == 200);
  double area10 = 0.0;
  for (double a : m10.tri_area) area10 += a;
  CHECK(std::abs(area10 - 1.0) <= 1e-12);

  CHECK_THROWS_AS(build_rect_mesh(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_rect_mesh(3, 0), std::invalid_argument);
}

TEST_CASE("boundary markers cover exactly the boundary nodes") {
  Mesh mesh = build_rect_mesh(7, 5, Rect{0, 0, 2.0, 1.0});
  for (int j = 0; j <= mesh.ny; ++j) {
    for (int i = 0; i <= mesh.nx; ++i) {
      const int n = mesh.node_index(i, j);
      const bool boundary = (i == 0 || i == mesh.nx || j == 0 || j == mesh.ny);
      if (boundary)
        CHECK(mesh.marker[n] != BoundaryMarker::Interior);
      else
        CHECK(mesh.marker[n] == BoundaryMarker::Interior);
      if (j == mesh.ny) CHECK(mesh.marker[n] == BoundaryMarker::DirichletTop);
      if (j == 0) CHECK(mesh.marker[n] == BoundaryMarker::DirichletBottom);
    }
  }
}

TEST_CASE("well markers replace the default convention") {
  Mesh mesh = build_rect_mesh(10, 10, Rect{0, 0, 2.2, 1.2});
  mark_well_corners(mesh, 0.3);
  CHECK(mesh.marker[mesh.node_index(0, 0)] == BoundaryMarker::Well);
  CHECK(mesh.marker[mesh.node_index(10, 10)] == BoundaryMarker::Well);
  CHECK(mesh.marker[mesh.node_index(5, 0)] == BoundaryMarker::Neumann);
  CHECK(mesh.marker[mesh.node_index(5, 5)] == BoundaryMarker::Interior);
}

TEST_CASE("mass matrix: entry sum, element matrix, domain area") {
  Mesh unit = build_rect_mesh(6, 9);
  SparseOperator M = assemble_mass(unit);
  CHECK(std::abs(dense(M.A).sum() - 1.0) <= 1e-12);
  CHECK(symmetry_defect(M.A) <= 1e-14);

  // one cell: the two element matrices area/12*[[2,1,1],[1,2,1],[1,1,2]]
  Mesh cell = build_rect_mesh(1, 1);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
  for (const auto& T : cell.tris) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        expected(T[i], T[j]) += 0.5 / 12.0 * (i == j ? 2.0 : 1.0);
  }
  SparseOperator Mc = assemble_mass(cell);
  CHECK((dense(Mc.A) - expected).cwiseAbs().maxCoeff() <= 1e-15);

  Mesh spe = build_rect_mesh(11, 6, Rect{0, 0, 2.2, 1.2});
  SparseOperator Ms = assemble_mass(spe);
  Vector ones = Vector::Ones(spe.n_nodes());
  CHECK(ones.dot(Ms.A * ones) == doctest::Approx(2.64).epsilon(1e-12));

  Vector lump = lumped_mass(spe);
  CHECK(lump.sum() == doctest::Approx(2.64).epsilon(1e-12));
  CHECK(lump.minCoeff() > 0.0);
}

TEST_CASE("exp(m) stiffness: constant scalings and dense oracle") {
  Mesh mesh = build_rect_mesh(4, 3);
  Vector zero = Vector::Zero(mesh.n_nodes());
  SparseOperator A0 = assemble_stiffness_expm(mesh, zero);
  SparseOperator Aplain = assemble_stiffness_tensor(mesh, Eigen::Matrix2d::Identity());
  CHECK((dense(A0.A) - dense(Aplain.A)).cwiseAbs().maxCoeff() <= 1e-14);

  Vector log2 = Vector::Constant(mesh.n_nodes(), std::log(2.0));
  SparseOperator A2 = assemble_stiffness_expm(mesh, log2);
  CHECK((dense(A2.A) - 2.0 * dense(Aplain.A)).cwiseAbs().maxCoeff() <=
        1e-14 * dense(A2.A).cwiseAbs().maxCoeff());

  Mesh two = build_rect_mesh(1, 1);
  Vector m = random_field(two, 42);
  SparseOperator A = assemble_stiffness_expm(two, m);
  Eigen::MatrixXd oracle = dense_expm_stiffness_oracle(two, m);
  CHECK((dense(A.A) - oracle).cwiseAbs().maxCoeff() <=
        1e-14 * oracle.cwiseAbs().maxCoeff());

  // Galerkin symmetry on a bigger mesh with rough m
  Mesh big = build_rect_mesh(12, 9);
  SparseOperator Abig = assemble_stiffness_expm(big, random_field(big, 7));
  CHECK(symmetry_defect(Abig.A) <= 1e-14);

  // kernel = constants before boundary conditions
  Vector c = Vector::Constant(big.n_nodes(), 3.25);
  CHECK((Abig.A * c).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("tensor stiffness rejects non-SPD coefficients") {
  Mesh mesh = build_rect_mesh(2, 2);
  Eigen::Matrix2d bad;
  bad << 1.0, 0.0, 0.0, -2.0;
  CHECK_THROWS_AS(assemble_stiffness_tensor(mesh, bad), std::invalid_argument);
  Eigen::Matrix2d asym;
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(assemble_stiffness_tensor(mesh, asym), std::invalid_argument);
}

TEST_CASE("dirichlet elimination: all-Neumann unchanged, constrained SPD") {
  Mesh mesh = build_rect_mesh(5, 4);
  SparseOperator A = assemble_stiffness_expm(mesh, random_field(mesh, 3));

  Mesh neumann = mesh;
  for (auto& m : neumann.marker)
    if (m != BoundaryMarker::Interior) m = BoundaryMarker::Neumann;
  SparseOperator same = apply_dirichlet(A, neumann);
  CHECK((dense(same.A) - dense(A.A)).cwiseAbs().maxCoeff() == 0.0);

  SparseOperator Ac = apply_dirichlet(A, mesh);
  CHECK(Ac.symmetric);
  Eigen::LLT<Eigen::MatrixXd> llt(dense(Ac.A));
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("observation operator") {
  Mesh mesh = build_rect_mesh(8, 8);
  // at a node
  std::vector<Eigen::Vector2d> pts{{0.25, 0.5}};
  SparseMat B = build_observation(mesh, pts);
  Vector row = Vector(B.transpose().col(0));
  CHECK(row.maxCoeff() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(row.sum() == doctest::Approx(1.0).epsilon(1e-13));

  // at a centroid: three weights of 1/3
  const auto& T0 = mesh.tris[0];
  Eigen::Vector2d cent =
      (mesh.nodes[T0[0]] + mesh.nodes[T0[1]] + mesh.nodes[T0[2]]) / 3.0;
  SparseMat Bc = build_observation(mesh, {cent});
  int nonzeros = 0;
  for (int k = 0; k < Bc.outerSize(); ++k)
    for (SparseMat::InnerIterator it(Bc, k); it; ++it) {
      CHECK(it.value() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
      ++nonzeros;
    }
  CHECK(nonzeros == 3);

  // linear reproduction and row sums
  NormalStream rng(11);
  std::vector<Eigen::Vector2d> sensors;
  for (int s = 0; s < 40; ++s)
    sensors.emplace_back(rng.uniform(), rng.uniform());
  SparseMat Bs = build_observation(mesh, sensors);
  Vector yfield = interpolate(mesh, [](const Eigen::Vector2d& x) { return x.y(); });
  Vector vals = Bs * yfield;
  for (int s = 0; s < 40; ++s)
    CHECK(std::abs(vals[s] - sensors[s].y()) <= 1e-13);
  Vector ones = Vector::Ones(mesh.n_nodes());
  CHECK(((Bs * ones).array() - 1.0).abs().maxCoeff() <= 1e-13);

  CHECK_THROWS_WITH_AS(build_observation(mesh, {{1.5, 0.5}}),
                       doctest::Contains("sensor 0"), std::invalid_argument);
}

TEST_CASE("coupling blocks match quadrature oracles and pair correctly") {
  Mesh mesh = build_rect_mesh(1, 1);
  Vector m = random_field(mesh, 21);
  Vector u = random_field(mesh, 22);
  Vector p = random_field(mesh, 23);
  restrict_to_v0(mesh, p);

  SparseMat C = assemble_block_C(mesh, m, u);
  // <C y, pt> equals direct quadrature of <y e^m grad u, grad pt>
  Vector y = random_field(mesh, 24);
  Vector pt = random_field(mesh, 25);
  restrict_to_v0(mesh, pt);
  double direct = 0.0;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const double coeff = std::exp(mesh.centroid_value(m, t)) * mesh.tri_area[t];
    direct += coeff * mesh.centroid_value(y, t) *
              mesh.grad_on_tri(u, t).dot(mesh.grad_on_tri(pt, t));
  }
  CHECK(pt.dot(C * y) == doctest::Approx(direct).epsilon(1e-13));

  // p = 0 kills S and W2
  Vector zero = Vector::Zero(mesh.n_nodes());
  CHECK(dense(assemble_block_S(mesh, m, zero)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(dense(assemble_block_W2(mesh, m, u, zero)).cwiseAbs().maxCoeff() == 0.0);

  // adjoint pairing on a bigger mesh, element loops against assembled blocks
  Mesh big = build_rect_mesh(6, 5);
  Vector mb = random_field(big, 31);
  Vector ub = random_field(big, 32);
  Vector pb = random_field(big, 33);
  restrict_to_v0(big, pb);
  SparseMat Cb = assemble_block_C(big, mb, ub);
  SparseMat Sb = assemble_block_S(big, mb, pb);
  Vector yb = random_field(big, 34);
  Vector qb = random_field(big, 35);
  restrict_to_v0(big, qb);

  const double lhs = (Cb * yb).dot(qb);
  const double rhs = yb.dot(Cb.transpose() * qb);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

  Vector ub0 = ub;
  restrict_to_v0(big, ub0);
  const double s_lhs = (Sb * ub0).dot(yb);
  const double s_rhs = ub0.dot(Sb.transpose() * yb);
  CHECK(s_lhs == doctest::Approx(s_rhs).epsilon(1e-12));

  // element-loop actions reproduce the assembled products
  Vector cy_loop = flux_test_vector(big, mb, ub, [&](int t) {
    return big.centroid_value(yb, t);
  });
  restrict_to_v0(big, cy_loop);
  CHECK((cy_loop - Cb * yb).norm() <= 1e-13 * (Cb * yb).norm());

  Vector ctq_loop = load_test_vector(big, mb, [&](int t) {
    return big.grad_on_tri(ub, t).dot(big.grad_on_tri(qb, t));
  });
  CHECK((ctq_loop - Cb.transpose() * qb).norm() <=
        1e-13 * (Cb.transpose() * qb).norm());
}

TEST_CASE("vtk writers produce legacy ascii files") {
  Mesh mesh = build_rect_mesh(2, 2);
  Vector f = interpolate(mesh, [](const Eigen::Vector2d& x) { return x.x(); });
  const std::string path = "test_field.vtk";
  write_vtk_fields(path, mesh, {{"f", f}});
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  bool has_point_data = false, has_scalars = false;
  while (std::getline(in, line)) {
    if (line.rfind("POINT_DATA", 0) == 0) has_point_data = true;
    if (line.rfind("SCALARS f double 1", 0) == 0) has_scalars = true;
  }
  CHECK(has_point_data);
  CHECK(has_scalars);
  std::remove(path.c_str());
}
