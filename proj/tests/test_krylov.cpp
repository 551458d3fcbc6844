#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "aoed/fem.hpp"
#include "aoed/krylov.hpp"
#include "aoed/rng.hpp"

using namespace aoed;

namespace {

SparseOperator sparse_from_dense(const Eigen::MatrixXd& A, bool symmetric) {
  SparseOperator op;
  op.A = A.sparseView();
  op.A.makeCompressed();
  op.symmetric = symmetric;
  return op;
}

Eigen::MatrixXd random_spd(int n, std::uint64_t seed) {
  NormalStream rng(seed);
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = rng();
  return B * B.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("cg on the identity converges in one iteration") {
  Counters counters;
  Vector b(5);
  b << 1, -2, 3, 0.5, 4;
  CgResult res = cg_solve([](const Vector& x) { return x; }, b, {}, 1e-12, 50,
                          &counters, CgTag::Inner);
  CHECK(res.converged);
  CHECK(res.iters == 1);
  CHECK((res.x - b).norm() <= 1e-12);
  CHECK(counters.snapshot().inner_cg == 1);
}

TEST_CASE("cg matches a dense factorization oracle on a 10x10 SPD system") {
  Eigen::MatrixXd A = random_spd(10, 5);
  Vector b(10);
  NormalStream rng(6);
  for (int i = 0; i < 10; ++i) b[i] = rng();
  Vector x_direct = A.ldlt().solve(b);

  Counters counters;
  CgResult res = cg_solve([&](const Vector& v) { return A * v; }, b, {}, 1e-12,
                          200, &counters, CgTag::Outer);
  CHECK(res.converged);
  CHECK((res.x - x_direct).norm() <= 1e-9 * x_direct.norm());
  CHECK(counters.snapshot().outer_cg == res.iters);

  // agreement between the direct sparse path and CG
  Vector x_sparse = sparse_direct_solve(sparse_from_dense(A, true), b);
  CHECK((x_sparse - x_direct).norm() <= 1e-10 * x_direct.norm());
}

TEST_CASE("cg energy decreases monotonically") {
  Eigen::MatrixXd A = random_spd(30, 9);
  Vector b(30);
  NormalStream rng(10);
  for (int i = 0; i < 30; ++i) b[i] = rng();
  double last = 1e300;
  auto energy = [&](const Vector& x) { return 0.5 * x.dot(A * x) - b.dot(x); };
  cg_solve([&](const Vector& v) { return A * v; }, b, {}, 1e-13, 200, nullptr,
           CgTag::None, NegCurvature::Error,
           [&](int, const Vector& x) {
             const double e = energy(x);
             CHECK(e <= last + 1e-12 * std::abs(last));
             last = e;
           });
}

TEST_CASE("negative curvature is reported with its iteration index") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
  A(3, 3) = -1.0;
  Vector b(4);
  b << 0, 0, 0, 1;
  CHECK_THROWS_AS(cg_solve([&](const Vector& v) { return A * v; }, b, {}, 1e-10,
                           50, nullptr, CgTag::None, NegCurvature::Error),
                  std::runtime_error);
  CgResult res = cg_solve([&](const Vector& v) { return A * v; }, b, {}, 1e-10,
                          50, nullptr, CgTag::None, NegCurvature::Truncate);
  CHECK(res.breakdown);
  CHECK(res.breakdown_iter == 0);
  CHECK(res.x.norm() > 0.0);  // preconditioned residual fallback
}

TEST_CASE("sparse direct solve handles identity, a 2x2 system, and rejects singular") {
  SparseOperator I = sparse_from_dense(Eigen::MatrixXd::Identity(3, 3), true);
  Vector b(3);
  b << 1, 2, 3;
  CHECK((sparse_direct_solve(I, b) - b).norm() == 0.0);

  Eigen::MatrixXd A2(2, 2);
  A2 << 2, 1, 1, 3;
  Vector b2(2);
  b2 << 5, 10;
  Vector x2 = sparse_direct_solve(sparse_from_dense(A2, true), b2);
  CHECK(x2[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x2[1] == doctest::Approx(3.0).epsilon(1e-12));

  Counters counters;
  sparse_direct_solve(I, b, &counters);
  CHECK(counters.snapshot().forward_like == 1);

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3, 3);
  S(0, 0) = 1.0;  // rank deficient
  CHECK_THROWS_AS(sparse_direct_solve(sparse_from_dense(S, false), b),
                  std::runtime_error);
}

TEST_CASE("lumped mass square root actions") {
  Mesh mesh = build_rect_mesh(6, 6);
  Vector lump = lumped_mass(mesh);

  Vector zero = Vector::Zero(mesh.n_nodes());
  CHECK(lumped_mass_sqrt_apply(lump, zero, false).norm() == 0.0);

  NormalStream rng(3);
  Vector v(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) v[i] = rng();
  Vector roundtrip =
      lumped_mass_sqrt_apply(lump, lumped_mass_sqrt_apply(lump, v, false), true);
  CHECK((roundtrip - v).cwiseAbs().maxCoeff() <= 1e-14 * v.cwiseAbs().maxCoeff());

  Vector bad = lump;
  bad[0] = 0.0;
  CHECK_THROWS_AS(lumped_mass_sqrt_apply(bad, v, true), std::logic_error);
}

TEST_CASE("whitened quadratic form has expectation n in the lumped metric") {
  // E[<z, Ml z>] = n for z = Ml^{-1/2} nu; Monte Carlo with a 3 sigma band
  Mesh mesh = build_rect_mesh(5, 5);
  Vector lump = lumped_mass(mesh);
  const int n = mesh.n_nodes();
  const int reps = 10000;
  NormalStream rng(77);
  double acc = 0.0, acc2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    Vector nu(n);
    for (int i = 0; i < n; ++i) nu[i] = rng();
    Vector z = lumped_mass_sqrt_apply(lump, nu, true);
    const double q = z.dot(lump.cwiseProduct(z));
    acc += q;
    acc2 += q * q;
  }
  const double mean = acc / reps;
  const double var = acc2 / reps - mean * mean;
  const double band = 3.0 * std::sqrt(var / reps);
  CHECK(std::abs(mean - n) <= band);
}
