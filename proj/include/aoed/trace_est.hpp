#pragma once

#include "aoed/krylov.hpp"
#include "aoed/rng.hpp"

namespace aoed {

// Gaussian probes z_k = Ml^{-1/2} nu_k, whitened in the lumped-mass metric.
// The set is regenerated bitwise from its seed and is held fixed across all
// designs during one OED solve.
struct ProbeSet {
  std::uint64_t seed = 0;
  std::vector<Vector> z;

  int count() const { return static_cast<int>(z.size()); }
};

ProbeSet make_probes(const Vector& lumped_diag, int n_tr, std::uint64_t seed);

// (1/n_tr) sum_k <z_k, Op z_k>_Ml for a symmetric operator given as a map on
// nodal coefficients. Unbiased for the matrix trace of the map.
double estimate_trace(const LinOp& op, const ProbeSet& probes,
                      const Vector& lumped_diag);

struct DeltaRow {
  double delta = 0.0;
  double trace_estimate = 0.0;  // tr(A C_delta)
  double exact_trace = 0.0;     // tr(A)
};

// Validation of the smoothed trace limit: C_delta = (delta K + I)^{-2} with K
// the 1-D chain Neumann Laplacian of matching dimension. tr(A C_delta)
// increases monotonically to tr(A) as delta decreases.
std::vector<DeltaRow> delta_limit_check(const Eigen::MatrixXd& A,
                                        const std::vector<double>& deltas);

// The chain Laplacian used by delta_limit_check, exposed for oracle tests.
Eigen::MatrixXd chain_neumann_laplacian(int n);

}  // namespace aoed
