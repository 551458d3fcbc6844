#include <doctest.h>

#include <cmath>

#include "aoed/forward.hpp"
#include "aoed/map_solver.hpp"

using namespace aoed;

namespace {

PriorParams tiny_prior_params() {
  PriorParams p;
  p.theta = Eigen::Matrix2d::Zero();
  p.theta(0, 0) = 2.5e-2;
  p.theta(1, 1) = 1.0e-1;
  p.alpha = 1.0;
  p.anchors = {{0.1, 0.1}, {0.1, 0.9}, {0.9, 0.1}, {0.9, 0.9}, {0.5, 0.5}};
  p.anchor_values = Vector::Zero(5);
  return p;
}

Vector y_field(const Mesh& mesh) {
  return interpolate(mesh, [](const Eigen::Vector2d& x) { return x.y(); });
}

}  // namespace

TEST_CASE("state solve reproduces the linear pressure profile for constant m") {
  Scenario scen;  // top 1, bottom 0, no source
  for (int k : {2, 5, 16}) {
    Mesh mesh = build_rect_mesh(k, k);
    Counters counters;
    StateOperator op(mesh, Vector::Zero(mesh.n_nodes()), scen);
    Vector u = op.solve_state(&counters);
    CHECK((u - y_field(mesh)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(counters.snapshot().forward_like == 1);
  }

  // the coefficient scales out of the homogeneous equation
  Mesh mesh = build_rect_mesh(7, 9);
  StateOperator op1(mesh, Vector::Constant(mesh.n_nodes(), -2.3), scen);
  StateOperator op2(mesh, Vector::Constant(mesh.n_nodes(), 1.7), scen);
  Vector u1 = op1.solve_state(nullptr);
  Vector u2 = op2.solve_state(nullptr);
  CHECK((u1 - u2).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("layered coefficient converges to the series-resistance profile") {
  // two-valued conductivity stacked in y; the 1-D reduction gives
  // u(mid) = R_lower / (R_lower + R_upper) and a constant vertical flux
  const double m1 = 0.8, m2 = -1.1;
  const double k1 = std::exp(m1), k2 = std::exp(m2);
  const double u_mid_exact = (0.5 / k1) / (0.5 / k1 + 0.5 / k2);
  const double flux_exact = 1.0 / (0.5 / k1 + 0.5 / k2);

  Scenario scen;
  std::vector<double> err_cont, err_chain, err_flux;
  for (int ny : {8, 16, 32, 64}) {
    const int nx = ny;
    Mesh mesh = build_rect_mesh(nx, ny);
    Vector m = interpolate(mesh, [&](const Eigen::Vector2d& x) {
      return x.y() < 0.5 ? m1 : m2;
    });
    StateOperator op(mesh, m, scen);
    Vector u = op.solve_state(nullptr);

    // 1-D resistor chain of the discretized coefficient: per-row conductivity
    // is the mean of the two triangle centroid values
    std::vector<double> K(ny);
    for (int j = 0; j < ny; ++j) {
      const double mj = m[mesh.node_index(0, j)];
      const double mj1 = m[mesh.node_index(0, j + 1)];
      K[j] = 0.5 * (std::exp((2.0 * mj + mj1) / 3.0) +
                    std::exp((mj + 2.0 * mj1) / 3.0));
    }
    double total_res = 0.0;
    for (int j = 0; j < ny; ++j) total_res += 1.0 / K[j];
    double res_below = 0.0;
    for (int j = 0; j < ny / 2; ++j) res_below += 1.0 / K[j];
    const double chain_mid = res_below / total_res;
    const double chain_flux = 1.0 / ((1.0 / ny) * total_res);

    const int ic = nx / 2;
    const double u_center = u[mesh.node_index(ic, ny / 2)];
    err_chain.push_back(std::abs(u_center - chain_mid));
    err_cont.push_back(std::abs(u_center - u_mid_exact));

    const double dy = 1.0 / ny;
    const int jf = ny / 4;
    const double flux =
        K[jf] * (u[mesh.node_index(ic, jf + 1)] - u[mesh.node_index(ic, jf)]) / dy;
    err_flux.push_back(std::abs(flux - chain_flux));
  }
  // lateral-boundary contamination dies out fast at the center column
  CHECK(err_chain.back() <= 1e-6);
  CHECK(err_flux.back() <= 1e-6 * flux_exact);
  // and the discrete profile converges to the continuum series formula
  for (std::size_t r = 1; r < err_cont.size(); ++r)
    CHECK(err_cont[r] < err_cont[r - 1]);
}

TEST_CASE("adjoint solve: zero misfit and zero weights give zero") {
  Mesh mesh = build_rect_mesh(8, 8);
  Scenario scen;
  SensorArray sensors = make_sensor_grid(mesh, 4, 4, 0.05);
  Vector m = Vector::Constant(mesh.n_nodes(), 0.2);
  StateOperator op(mesh, m, scen);
  Vector u = op.solve_state(nullptr);

  Vector w = Vector::Ones(sensors.count());
  Vector d_exact = sensors.B * u;
  Vector p = solve_adjoint(op, sensors, w, u, d_exact, nullptr);
  CHECK(p.norm() <= 1e-12);

  Vector d_off = d_exact.array() + 0.1;
  Vector p0 = solve_adjoint(op, sensors, Vector::Zero(sensors.count()), u, d_off, nullptr);
  CHECK(p0.norm() <= 1e-12);

  Vector p1 = solve_adjoint(op, sensors, w, u, d_off, nullptr);
  CHECK(p1.norm() > 0.0);
  for (int i = 0; i < mesh.n_nodes(); ++i)
    if (mesh.is_dirichlet(i)) CHECK(p1[i] == 0.0);
}

TEST_CASE("weighted observation transpose identity") {
  Mesh mesh = build_rect_mesh(9, 6);
  Scenario scen;
  SensorArray sensors = make_sensor_grid(mesh, 3, 3, 0.05);
  StateOperator op(mesh, Vector::Zero(mesh.n_nodes()), scen);
  NormalStream rng(5);
  Vector w(sensors.count());
  for (int j = 0; j < sensors.count(); ++j) w[j] = 0.25 + 0.5 * rng.uniform();
  const Vector wsig = sensors.w_sigma(w);

  for (int rep = 0; rep < 4; ++rep) {
    Vector r(sensors.count());
    for (int j = 0; j < sensors.count(); ++j) r[j] = rng();
    Vector s = Vector::Zero(mesh.n_nodes());
    for (int i = 0; i < mesh.n_nodes(); ++i) s[i] = rng();
    restrict_to_v0(mesh, s);
    Vector as = op.solve_homogeneous(s, nullptr);
    const double lhs = (sensors.B.transpose() * wsig.cwiseProduct(r).eval()).dot(as);
    const double rhs = wsig.cwiseProduct(r).dot(sensors.B * as);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("parameter-to-observable map: linear field, boundary scaling, FD") {
  Mesh mesh = build_rect_mesh(10, 10);
  Scenario scen;
  SensorArray sensors = make_sensor_grid(mesh, 3, 3, 0.05);

  Vector f0 = apply_param_to_obs(mesh, Vector::Zero(mesh.n_nodes()), scen,
                                 sensors, nullptr);
  for (int j = 0; j < sensors.count(); ++j)
    CHECK(f0[j] == doctest::Approx(sensors.coords[j].y()).epsilon(1e-12));

  // doubling both Dirichlet values doubles the observations (f = 0, h = 0)
  Scenario scaled = scen;
  scaled.dirichlet_top = 2.0 * scen.dirichlet_top;
  scaled.dirichlet_bottom = 2.0 * scen.dirichlet_bottom;
  Vector m = interpolate(mesh, [](const Eigen::Vector2d& x) {
    return 0.4 * std::sin(3.0 * x.x()) * x.y();
  });
  Vector fm = apply_param_to_obs(mesh, m, scen, sensors, nullptr);
  Vector fm2 = apply_param_to_obs(mesh, m, scaled, sensors, nullptr);
  CHECK((fm2 - 2.0 * fm).cwiseAbs().maxCoeff() <= 1e-12);

  // directional derivative against the incremental-state solve
  NormalStream rng(31);
  Vector dm(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) dm[i] = rng();
  dm *= 0.5 / dm.cwiseAbs().maxCoeff();

  StateOperator op(mesh, m, scen);
  Vector u = op.solve_state(nullptr);
  Vector cy = flux_test_vector(mesh, m, u,
                               [&](int t) { return mesh.centroid_value(dm, t); });
  restrict_to_v0(mesh, cy);
  Vector v = op.solve_homogeneous(-cy, nullptr);
  Vector dfdm = sensors.B * v;

  const double h = 1e-5;
  Vector fp = apply_param_to_obs(mesh, m + h * dm, scen, sensors, nullptr);
  Vector fmn = apply_param_to_obs(mesh, m - h * dm, scen, sensors, nullptr);
  Vector fd = (fp - fmn) / (2.0 * h);
  CHECK((fd - dfdm).norm() <= 1e-6 * dfdm.norm());
}

TEST_CASE("synthetic data: determinism, noiseless limit, noise statistics") {
  Mesh mesh = build_rect_mesh(8, 8);
  Scenario scen;
  PriorModel prior(mesh, [&] {
    PriorParams p = tiny_prior_params();
    return p;
  }());
  SensorArray sensors = make_sensor_grid(mesh, 3, 3, 0.05);

  auto a = generate_data_samples(prior, scen, sensors, 5, 77, nullptr);
  auto b = generate_data_samples(prior, scen, sensors, 5, 77, nullptr);
  CHECK(a.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK((a[i].d - b[i].d).norm() == 0.0);
    CHECK(a[i].d.size() == sensors.count());
  }

  SensorArray quiet = sensors;
  quiet.sigma = Vector::Constant(sensors.count(), 1e-15);
  auto nl = generate_data_samples(prior, scen, quiet, 2, 77, nullptr);
  for (const auto& s : nl) {
    Vector fm = apply_param_to_obs(mesh, s.m_gen, scen, quiet, nullptr);
    CHECK((s.d - fm).cwiseAbs().maxCoeff() <= 1e-13);
  }

  // empirical noise standard deviation over many replicates
  const int reps = 1000;
  double acc = 0.0;
  long count = 0;
  for (int r = 0; r < reps; ++r) {
    auto s = generate_data_samples(prior, scen, sensors, 1, 1000 + r, nullptr);
    Vector fm = apply_param_to_obs(mesh, s[0].m_gen, scen, sensors, nullptr);
    Vector eta = s[0].d - fm;
    acc += eta.squaredNorm();
    count += eta.size();
  }
  const double sigma_hat = std::sqrt(acc / count);
  CHECK(std::abs(sigma_hat - 0.05) <= 0.05 * 0.05);
}

TEST_CASE("mollified point source integrates to its strength") {
  Mesh mesh = build_rect_mesh(44, 24, Rect{0, 0, 2.2, 1.2});
  mark_well_corners(mesh, 0.15);
  Scenario scen;
  scen.source = Scenario::Source::MollifiedPoint;
  scen.source_strength = 50.0;
  scen.source_width = 1e-2;  // resolvable width for the quadrature check
  scen.source_center = Eigen::Vector2d(1.1, 0.6);
  scen.dirichlet_top = 0.0;
  scen.dirichlet_bottom = 0.0;

  StateOperator op(mesh, Vector::Zero(mesh.n_nodes()), scen);
  Vector u = op.solve_state(nullptr);
  CHECK(u.allFinite());
  CHECK(u.maxCoeff() > 0.0);  // injection raises the pressure
  // wells pin the corners to zero
  CHECK(u[mesh.node_index(0, 0)] == 0.0);
}
