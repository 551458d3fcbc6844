#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "aoed/prior.hpp"

using namespace aoed;

namespace {

PriorParams example_params(double alpha = 1.0) {
  PriorParams p;
  p.theta = Eigen::Matrix2d::Zero();
  p.theta(0, 0) = 2.5e-2;
  p.theta(1, 1) = 1.0e-1;
  p.alpha = alpha;
  p.anchors = {{0.1, 0.1}, {0.1, 0.9}, {0.9, 0.1}, {0.9, 0.9}, {0.5, 0.5}};
  p.anchor_values = Vector::Zero(5);
  for (int a = 0; a < 5; ++a)
    p.anchor_values[a] = 0.5 + 0.3 * a;  // arbitrary deterministic values
  return p;
}

}  // namespace

TEST_CASE("prior mean: constants are reproduced exactly") {
  Mesh mesh = build_rect_mesh(10, 10);
  PriorParams p = example_params();
  const double c = -1.75;
  p.anchor_values = Vector::Constant(5, c);
  PriorModel prior(mesh, p);
  CHECK((prior.mean().array() - c).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("prior mean matches a dense normal-equations oracle") {
  Mesh mesh = build_rect_mesh(8, 8);
  PriorParams p = example_params();
  PriorModel prior(mesh, p);

  Eigen::MatrixXd K =
      Eigen::MatrixXd(assemble_stiffness_tensor(mesh, p.theta).A);
  Vector load = Vector::Zero(mesh.n_nodes());
  for (std::size_t a = 0; a < p.anchors.size(); ++a) {
    const int nd = mesh.nearest_node(p.anchors[a]);
    K(nd, nd) += p.alpha;
    load[nd] += p.alpha * p.anchor_values[static_cast<Eigen::Index>(a)];
  }
  Vector oracle = K.ldlt().solve(load);
  CHECK((prior.mean() - oracle).norm() <= 1e-10 * oracle.norm());

  // the anchored operator must be SPD
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("covariance actions: inverse pair, symmetry, SPD") {
  Mesh mesh = build_rect_mesh(9, 7);
  PriorModel prior(mesh, example_params());
  NormalStream rng(19);

  for (int r = 0; r < 50; ++r) {
    Vector v(mesh.n_nodes());
    for (int i = 0; i < mesh.n_nodes(); ++i) v[i] = rng();
    Vector roundtrip = prior.apply_precision(prior.apply_covariance(v));
    CHECK((roundtrip - v).norm() <= 1e-8 * v.norm());
    // SPD in the lumped metric
    CHECK(v.dot(prior.lumped().cwiseProduct(prior.apply_covariance(v))) > 0.0);
  }

  Vector u(mesh.n_nodes()), v(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    u[i] = rng();
    v[i] = rng();
  }
  const double a = u.dot(prior.lumped().cwiseProduct(prior.apply_covariance(v)));
  const double b = v.dot(prior.lumped().cwiseProduct(prior.apply_covariance(u)));
  CHECK(a == doctest::Approx(b).epsilon(1e-10));

  // dual precision and its inverse close the loop
  Vector g = prior.precision_dual(v);
  CHECK((prior.covariance_from_dual(g) - v).norm() <= 1e-8 * v.norm());
}

TEST_CASE("sampling: determinism, mean band, variance against dense oracle") {
  Mesh mesh = build_rect_mesh(8, 8);
  PriorModel prior(mesh, example_params());
  const int n = mesh.n_nodes();

  Vector s1 = prior.sample(std::uint64_t{12345});
  Vector s2 = prior.sample(std::uint64_t{12345});
  CHECK((s1 - s2).norm() == 0.0);  // bit-identical draws
  CHECK((s1 - prior.sample(std::uint64_t{12346})).norm() > 0.0);

  Eigen::MatrixXd G = prior.dense_covariance();
  Vector var = G.diagonal();

  const int N = 1000;
  Vector mean = Vector::Zero(n);
  Vector second = Vector::Zero(n);
  Eigen::MatrixXd cov_emp = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < N; ++r) {
    Vector s = prior.sample(substream_seed(99, "draw", r));
    mean += s;
    Vector d = s - prior.mean();
    second += d.cwiseProduct(d);
    cov_emp += d * d.transpose();
  }
  mean /= N;
  second /= N;
  cov_emp /= N;

  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(mean[i] - prior.mean()[i]) <= 4.0 * std::sqrt(var[i] / N));
    // sample variance concentration, ~4 sigma
    CHECK(std::abs(second[i] - var[i]) <=
          4.0 * std::sqrt(2.0 / N) * var[i] + 1e-12);
  }

  // whitening consistency at the Monte Carlo rate (Frobenius)
  const double expected_sq = (G.trace() * G.trace() + G.squaredNorm()) / N;
  CHECK((cov_emp - G).norm() <= 2.0 * std::sqrt(expected_sq));
}

TEST_CASE("variance field: anchors dip, dense vs probing, size guard") {
  Mesh mesh = build_rect_mesh(10, 10);
  PriorParams p = example_params();
  PriorModel prior(mesh, p);

  Vector var = prior.variance_field();
  std::vector<double> sorted(var.data(), var.data() + var.size());
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (const auto& a : p.anchors)
    CHECK(var[mesh.nearest_node(a)] < median);

  Vector probed = prior.variance_field(/*dense_threshold=*/10,
                                       /*n_probe=*/20000, /*seed=*/4242);
  CHECK((probed - var).norm() <= 0.05 * var.norm());

  CHECK_THROWS_AS(prior.variance_field(10, 0), std::runtime_error);
}

TEST_CASE("stronger anchors strictly reduce anchored-node variance") {
  Mesh mesh = build_rect_mesh(8, 8);
  std::vector<double> alphas{0.5, 1.0, 2.0};
  std::vector<double> at_anchor;
  for (double a : alphas) {
    PriorParams p = example_params(a);
    PriorModel prior(mesh, p);
    Vector var = prior.variance_field();
    double acc = 0.0;
    for (const auto& x : p.anchors) acc += var[mesh.nearest_node(x)];
    at_anchor.push_back(acc);
  }
  CHECK(at_anchor[1] < at_anchor[0]);
  CHECK(at_anchor[2] < at_anchor[1]);
}

TEST_CASE("trace of the covariance map equals the integrated variance field") {
  Mesh mesh = build_rect_mesh(7, 7);
  PriorModel prior(mesh, example_params());
  Eigen::MatrixXd G = prior.dense_covariance();
  const double trace = (G * prior.lumped().asDiagonal()).trace();
  const double integral = prior.lumped().dot(G.diagonal());
  CHECK(trace == doctest::Approx(integral).epsilon(1e-13));
}

TEST_CASE("mollified anchors give an SPD operator and a usable mean") {
  Mesh mesh = build_rect_mesh(8, 8);
  PriorParams p = example_params();
  p.mollified = true;
  p.mollify_radius = 0.08;
  PriorModel prior(mesh, p);
  CHECK(prior.mean().allFinite());
  // constants still reproduced when every anchor value matches
  p.anchor_values = Vector::Constant(5, 2.0);
  PriorModel prior2(mesh, p);
  CHECK((prior2.mean().array() - 2.0).abs().maxCoeff() <= 1e-9);
}
