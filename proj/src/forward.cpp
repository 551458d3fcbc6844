#include "aoed/forward.hpp"

#include <cmath>
#include <stdexcept>

namespace aoed {

double Scenario::source_value(const Eigen::Vector2d& x) const {
  if (source == Source::None) return 0.0;
  const double two_pi = 6.283185307179586476925286766559;
  const double r2 = (x - source_center).squaredNorm();
  return source_strength / (two_pi * source_width) *
         std::exp(-0.5 * r2 / source_width);
}

SensorArray make_sensor_grid(const Mesh& mesh, int sx, int sy, double sigma) {
  if (sx < 1 || sy < 1) throw std::invalid_argument("make_sensor_grid: empty grid");
  if (!(sigma > 0.0)) throw std::invalid_argument("make_sensor_grid: sigma must be positive");
  SensorArray arr;
  const Rect& b = mesh.box;
  // interior lattice: keeps sensors off the Dirichlet boundaries
  for (int j = 1; j <= sy; ++j)
    for (int i = 1; i <= sx; ++i)
      arr.coords.emplace_back(b.x0 + b.width() * i / (sx + 1),
                              b.y0 + b.height() * j / (sy + 1));
  arr.B = build_observation(mesh, arr.coords);
  arr.sigma = Vector::Constant(arr.count(), sigma);
  return arr;
}

StateOperator::StateOperator(const Mesh& mesh, Vector m, const Scenario& scen)
    : mesh_(&mesh), scen_(scen), m_(std::move(m)) {
  if (m_.size() != mesh.n_nodes())
    throw std::invalid_argument("StateOperator: field/mesh mismatch");
  if (!m_.allFinite())
    throw std::invalid_argument("StateOperator: parameter field must be finite");
  SparseOperator A = assemble_stiffness_expm(mesh, m_);
  A_full_ = A.A;
  A_c_ = apply_dirichlet(A, mesh).A;
  fact_.compute(A_c_);
  if (fact_.info() != Eigen::Success)
    throw std::runtime_error("StateOperator: constrained stiffness not factorizable");

  lift_ = dirichlet_lift(mesh, scen_.dirichlet_top, scen_.dirichlet_bottom, 0.0);

  f_dual_ = Vector::Zero(mesh.n_nodes());
  if (scen_.source != Scenario::Source::None) {
    // edge-midpoint rule; degree-2 exact, resolves the source better than a
    // single centroid point
    for (int t = 0; t < mesh.n_tris(); ++t) {
      const auto& T = mesh.tris[t];
      const Eigen::Vector2d mid01 = 0.5 * (mesh.nodes[T[0]] + mesh.nodes[T[1]]);
      const Eigen::Vector2d mid12 = 0.5 * (mesh.nodes[T[1]] + mesh.nodes[T[2]]);
      const Eigen::Vector2d mid20 = 0.5 * (mesh.nodes[T[2]] + mesh.nodes[T[0]]);
      const double f01 = scen_.source_value(mid01);
      const double f12 = scen_.source_value(mid12);
      const double f20 = scen_.source_value(mid20);
      const double w = mesh.tri_area[t] / 3.0;
      // phi_k at edge midpoints: 1/2 on the two adjacent edges, 0 opposite
      f_dual_[T[0]] += w * 0.5 * (f01 + f20);
      f_dual_[T[1]] += w * 0.5 * (f01 + f12);
      f_dual_[T[2]] += w * 0.5 * (f12 + f20);
    }
  }
}

Vector StateOperator::solve_state(Counters* counters) const {
  Vector b = f_dual_;
  dirichlet_rhs(A_full_, *mesh_, lift_, b);
  Vector u = fact_.solve(b);
  if (counters) counters->add_forward_like(1);
  const double bn = b.norm();
  if (bn > 0.0 && (A_c_ * u - b).norm() > 1e-10 * bn)
    throw std::runtime_error("solve_state: poor residual from direct solve");
  return u;
}

Vector StateOperator::solve_homogeneous(Vector rhs, Counters* counters) const {
  restrict_to_v0(*mesh_, rhs);
  Vector v = fact_.solve(rhs);
  if (counters) counters->add_forward_like(1);
  return v;
}

Vector solve_adjoint(const StateOperator& op, const SensorArray& sensors,
                     const Vector& w, const Vector& u, const Vector& d,
                     Counters* counters) {
  const Vector wsig = sensors.w_sigma(w);
  Vector misfit = sensors.B * u - d;
  Vector rhs = -(sensors.B.transpose() * wsig.cwiseProduct(misfit).eval());
  return op.solve_homogeneous(std::move(rhs), counters);
}

Vector apply_param_to_obs(const Mesh& mesh, const Vector& m,
                          const Scenario& scen, const SensorArray& sensors,
                          Counters* counters) {
  StateOperator op(mesh, m, scen);
  return sensors.B * op.solve_state(counters);
}

std::vector<DataSample> generate_data_samples(
    const PriorModel& prior, const Scenario& scen, const SensorArray& sensors,
    int n_d, std::uint64_t master_seed, Counters* counters,
    const char* draw_stream, const char* noise_stream) {
  if (n_d < 1) throw std::invalid_argument("generate_data_samples: n_d must be >= 1");
  std::vector<DataSample> out;
  out.reserve(n_d);
  for (int i = 0; i < n_d; ++i) {
    DataSample s;
    s.truth_seed = substream_seed(master_seed, draw_stream, i);
    s.noise_seed = substream_seed(master_seed, noise_stream, i);
    s.m_gen = prior.sample(s.truth_seed);
    s.d = apply_param_to_obs(prior.mesh(), s.m_gen, scen, sensors, counters);
    NormalStream rng(s.noise_seed);
    for (Eigen::Index j = 0; j < s.d.size(); ++j) s.d[j] += sensors.sigma[j] * rng();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace aoed
