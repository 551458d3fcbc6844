#pragma once

#include "aoed/config.hpp"

namespace aoed {

// Experiment drivers behind the CLI subcommands. Each writes its CSV/VTK
// outputs into out_dir (created if missing) and returns a small summary.
// Outputs are byte-reproducible for a fixed config and master seed.

struct ForwardResult {
  double state_min = 0.0, state_max = 0.0;
};
ForwardResult run_forward(const ExperimentConfig& cfg, const std::string& out_dir);

struct MapResult {
  bool converged = false;
  int newton_iters = 0;
  double cost = 0.0;
  double rel_error_vs_truth = 0.0;
};
MapResult run_map(const ExperimentConfig& cfg, const std::string& out_dir);

struct OedEvalResult {
  double psi = 0.0;
  bool reliable = true;
  CounterSnapshot cost;
};
OedEvalResult run_oed_eval(const ExperimentConfig& cfg, const std::string& out_dir);

struct OedSolveResult {
  int n_active = 0;
  bool all_stages_converged = true;
  double max_binary_distance = 0.0;  // max_j min(w_j, 1-w_j)
};
OedSolveResult run_oed_solve(const ExperimentConfig& cfg, const std::string& out_dir);

struct CompareDesignsResult {
  // one entry per penalty value in oed.gammas
  struct Budget {
    double gamma = 0.0;
    int n_active = 0;
    double optimal_v_bar = 0.0;
    double optimal_e_bar = 0.0;
    int better_v_than = 0;  // random designs with larger V-bar
    int rank_e_bar = 0;     // 0-based rank of the optimal design's E-bar
    int n_random = 0;
  };
  std::vector<Budget> budgets;
};
CompareDesignsResult run_compare_designs(const ExperimentConfig& cfg,
                                         const std::string& out_dir);

enum class ScalingSweep { ParamDim, SensorDim };

struct ScalingRow {
  int n = 0, n_s = 0;
  long inner_cg = 0, outer_cg = 0, newton = 0, forward_like = 0;
  long oed_iters = 0;
  double psi = 0.0;
};
std::vector<ScalingRow> run_scaling_study(const ExperimentConfig& cfg,
                                          ScalingSweep sweep,
                                          const std::string& out_dir);

struct GradcheckResult {
  int n_checks = 0;
  int n_failed = 0;
};
GradcheckResult run_gradcheck(const ExperimentConfig& cfg, const std::string& out_dir);

struct DeltaCheckResult {
  bool monotone = false;
  double final_deficit_rel = 0.0;
};
DeltaCheckResult run_delta_check(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace aoed
