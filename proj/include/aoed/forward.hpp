#pragma once

#include <Eigen/SparseCholesky>

#include "aoed/counters.hpp"
#include "aoed/fem.hpp"
#include "aoed/prior.hpp"

namespace aoed {

// Forward-problem data: boundary values, source term, well setup.
struct Scenario {
  enum class Source { None, MollifiedPoint };

  double dirichlet_top = 1.0;
  double dirichlet_bottom = 0.0;
  Source source = Source::None;
  double source_strength = 50.0;   // C
  double source_width = 1e-4;      // L
  Eigen::Vector2d source_center{1.1, 0.6};
  double well_radius = 0.0;        // >0 marks corner wells on the mesh

  // f(x) = C/(2 pi L) exp(-|x-x0|^2 / (2L))
  double source_value(const Eigen::Vector2d& x) const;
};

// Candidate sensors: coordinates, observation operator, noise levels.
struct SensorArray {
  std::vector<Eigen::Vector2d> coords;
  SparseMat B;     // n_s x n
  Vector sigma;    // per-sensor noise std, all > 0

  int count() const { return static_cast<int>(coords.size()); }
  Vector w_sigma(const Vector& w) const {  // diag(w_j / sigma_j^2)
    return w.cwiseQuotient(sigma.cwiseProduct(sigma));
  }
};

SensorArray make_sensor_grid(const Mesh& mesh, int sx, int sy, double sigma);

// Factorized exp(m)-stiffness with Dirichlet elimination. One factorization
// serves every state/adjoint/incremental solve at this linearization point;
// each solve still counts as one forward-like solve.
class StateOperator {
 public:
  StateOperator(const Mesh& mesh, Vector m, const Scenario& scen);

  const Mesh& mesh() const { return *mesh_; }
  const Vector& m() const { return m_; }
  const SparseMat& full_matrix() const { return A_full_; }

  // State solve with the scenario boundary data and source.
  Vector solve_state(Counters* counters) const;

  // Zero-Dirichlet solve for adjoint/incremental right-hand sides; the rhs is
  // a dual vector and its Dirichlet entries are ignored.
  Vector solve_homogeneous(Vector rhs, Counters* counters) const;

 private:
  const Mesh* mesh_;
  Scenario scen_;
  Vector m_;
  SparseMat A_full_;
  SparseMat A_c_;
  Eigen::SimplicialLDLT<SparseMat> fact_;
  Vector lift_;
  Vector f_dual_;
};

// Weighted-misfit adjoint: solves <e^m grad p, grad ut> = -<B* Wsig (Bu-d), ut>.
Vector solve_adjoint(const StateOperator& op, const SensorArray& sensors,
                     const Vector& w, const Vector& u, const Vector& d,
                     Counters* counters);

// f(m) = B u(m).
Vector apply_param_to_obs(const Mesh& mesh, const Vector& m,
                          const Scenario& scen, const SensorArray& sensors,
                          Counters* counters);

struct DataSample {
  Vector d;
  Vector m_gen;  // generating parameter draw, kept for diagnostics
  std::uint64_t truth_seed = 0;
  std::uint64_t noise_seed = 0;
};

// d_i = f(m_i) + eta_i with m_i prior draws and eta_i ~ N(0, diag(sigma^2)).
// Deterministic given the master seed; substreams are indexed per sample, so
// the set is independent of evaluation order. `stream` names the substream
// pair ("prior_draws"/"noise" for training data, "eval_*" for fresh samples).
std::vector<DataSample> generate_data_samples(
    const PriorModel& prior, const Scenario& scen, const SensorArray& sensors,
    int n_d, std::uint64_t master_seed, Counters* counters,
    const char* draw_stream = "prior_draws", const char* noise_stream = "noise");

}  // namespace aoed
