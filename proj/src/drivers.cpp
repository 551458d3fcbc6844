#include "aoed/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>

#include "aoed/csv.hpp"
#include "aoed/vtk_io.hpp"

namespace aoed {

namespace {

namespace fs = std::filesystem;

std::string joined(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

struct Bench {
  std::unique_ptr<Mesh> mesh;
  Scenario scen;
  std::unique_ptr<PriorModel> prior;
  SensorArray sensors;
  Vector m_true;
};

Bench make_bench(const ExperimentConfig& cfg, int nx, int ny, int sx, int sy) {
  Bench b;
  b.mesh = std::make_unique<Mesh>(cfg.build_mesh(nx, ny));
  b.scen = cfg.build_scenario();
  b.m_true = cfg.truth_field(*b.mesh);
  b.prior = std::make_unique<PriorModel>(*b.mesh, cfg.prior_params(*b.mesh));
  b.sensors = make_sensor_grid(*b.mesh, sx, sy, cfg.get("design.sigma", 0.05));
  return b;
}

Bench make_bench(const ExperimentConfig& cfg) {
  return make_bench(cfg, cfg.get("mesh.nx", 32), cfg.get("mesh.ny", 32),
                    cfg.get("design.sensors_x", 10), cfg.get("design.sensors_y", 10));
}

// Synthetic observations of the truth field, generated on a refined mesh so
// the data do not inherit the coarse discretization.
Vector make_truth_data(const ExperimentConfig& cfg, const Bench& b,
                       Counters* counters) {
  const int refine = std::max(1, cfg.get("truth.refine", 2));
  Mesh fine = cfg.build_mesh(b.mesh->nx * refine, b.mesh->ny * refine);
  Vector m_fine = cfg.truth_field(fine);
  StateOperator op(fine, m_fine, b.scen);
  Vector u = op.solve_state(counters);
  SparseMat Bf = build_observation(fine, b.sensors.coords);
  Vector d = Bf * u;
  NormalStream rng(substream_seed(cfg.seed(), "truth_noise"));
  for (Eigen::Index j = 0; j < d.size(); ++j) d[j] += b.sensors.sigma[j] * rng();
  return d;
}

void write_design_csv(const std::string& path, const SensorArray& sensors,
                      const Vector& w, const Vector& w_binary) {
  CsvWriter csv(path, "design v1");
  csv.row("sensor", "x", "y", "w", "w_binary");
  for (int j = 0; j < sensors.count(); ++j)
    csv.row(j, sensors.coords[j].x(), sensors.coords[j].y(), w[j], w_binary[j]);
}

}  // namespace

ForwardResult run_forward(const ExperimentConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  Counters counters;
  Bench b = make_bench(cfg);
  StateOperator op(*b.mesh, b.m_true, b.scen);
  Vector u = op.solve_state(&counters);
  Vector obs = b.sensors.B * u;

  write_vtk_fields(joined(out_dir, "truth_m.vtk"), *b.mesh, {{"m_true", b.m_true}});
  write_vtk_fields(joined(out_dir, "state_u.vtk"), *b.mesh, {{"u", u}});
  CsvWriter csv(joined(out_dir, "obs.csv"), "observations v1");
  csv.row("sensor", "x", "y", "value");
  for (int j = 0; j < b.sensors.count(); ++j)
    csv.row(j, b.sensors.coords[j].x(), b.sensors.coords[j].y(), obs[j]);
  write_counters_csv(joined(out_dir, "counters.csv"),
                     {{"forward", counters.snapshot()}});

  ForwardResult res;
  res.state_min = u.minCoeff();
  res.state_max = u.maxCoeff();
  return res;
}

MapResult run_map(const ExperimentConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  Counters counters;
  Bench b = make_bench(cfg);
  Vector d = make_truth_data(cfg, b, &counters);
  Vector w = Vector::Ones(b.sensors.count());

  MapOptions mo = cfg.oed_options().map;
  MapSolution sol = solve_map(*b.prior, b.scen, b.sensors, w, d,
                              b.prior->mean(), mo, &counters);

  write_vtk_fields(joined(out_dir, "map.vtk"), *b.mesh,
                   {{"m_map", sol.m}, {"m_true", b.m_true}, {"u", sol.u}});
  CsvWriter conv(joined(out_dir, "convergence.csv"), "map_convergence v1");
  conv.row("iter", "cost");
  for (std::size_t k = 0; k < sol.cost_history.size(); ++k)
    conv.row(k, sol.cost_history[k]);
  write_counters_csv(joined(out_dir, "counters.csv"), {{"map", counters.snapshot()}});

  MapResult res;
  res.converged = sol.converged;
  res.newton_iters = sol.newton_iters;
  res.cost = sol.cost;
  res.rel_error_vs_truth = relative_error(b.prior->mass(), sol.m, b.m_true);
  return res;
}

namespace {

struct Frozen {
  std::vector<DataSample> samples;
  ProbeSet probes;
};

Frozen make_frozen(const ExperimentConfig& cfg, const Bench& b, Counters* counters) {
  Frozen f;
  const int n_d = cfg.get("oed.n_d", 5);
  const int n_tr = cfg.get("oed.n_tr", 20);
  f.samples = generate_data_samples(*b.prior, b.scen, b.sensors, n_d,
                                    cfg.seed(), counters);
  f.probes = make_probes(b.prior->lumped(), n_tr,
                         substream_seed(cfg.seed(), "probes"));
  return f;
}

}  // namespace

OedEvalResult run_oed_eval(const ExperimentConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  Counters counters;
  Bench b = make_bench(cfg);
  Frozen f = make_frozen(cfg, b, &counters);
  OedProblem prob(*b.prior, b.scen, b.sensors, std::move(f.samples),
                  std::move(f.probes), cfg.oed_options(), counters);

  Vector w = Vector::Ones(b.sensors.count());
  OedEval ev = prob.evaluate(w, true);

  CsvWriter obj(joined(out_dir, "objective.csv"), "oed_objective v1");
  obj.row("psi_hat", "n_d", "n_tr", "reliable");
  obj.row(ev.psi, static_cast<int>(prob.samples().size()), prob.probes().count(),
          ev.reliable ? 1 : 0);
  CsvWriter grad(joined(out_dir, "gradient.csv"), "oed_gradient v1");
  grad.row("sensor", "x", "y", "w", "grad");
  for (int j = 0; j < b.sensors.count(); ++j)
    grad.row(j, b.sensors.coords[j].x(), b.sensors.coords[j].y(), w[j], ev.grad[j]);
  write_counters_csv(joined(out_dir, "counters.csv"),
                     {{"oed_eval", ev.cost}, {"total", counters.snapshot()}});

  OedEvalResult res;
  res.psi = ev.psi;
  res.reliable = ev.reliable;
  res.cost = ev.cost;
  return res;
}

OedSolveResult run_oed_solve(const ExperimentConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  Counters counters;
  Bench b = make_bench(cfg);
  Frozen f = make_frozen(cfg, b, &counters);
  OedProblem prob(*b.prior, b.scen, b.sensors, std::move(f.samples),
                  std::move(f.probes), cfg.oed_options(), counters);

  OuterOptions oo = cfg.outer_options();
  CsvWriter hist(joined(out_dir, "stages.csv"), "oed_stages v1");
  hist.row("stage", "family", "eps", "iter", "mu", "phi", "psi", "penalty",
           "proj_grad_rel");
  oo.on_iteration = [&hist](int stage, PenaltyFamily fam, double eps, int iter,
                            double mu, double phi, double psi, double pen,
                            double pg) {
    hist.row(stage, fam == PenaltyFamily::L1 ? "l1" : "eps", eps, iter, mu, phi,
             psi, pen, pg);
  };
  OuterSolveRecord rec = solve_outer(prob, oo);

  write_design_csv(joined(out_dir, "design.csv"), b.sensors, rec.w_final,
                   rec.w_binary);
  write_vtk_points(joined(out_dir, "design.vtk"), b.sensors.coords,
                   {{"w", rec.w_final}, {"w_binary", rec.w_binary}});
  write_counters_csv(joined(out_dir, "counters.csv"),
                     {{"oed_solve", rec.cost}, {"total", counters.snapshot()}});

  OedSolveResult res;
  res.n_active = rec.n_active;
  res.all_stages_converged = rec.all_stages_converged;
  for (Eigen::Index j = 0; j < rec.w_final.size(); ++j)
    res.max_binary_distance = std::max(
        res.max_binary_distance, std::min(rec.w_final[j], 1.0 - rec.w_final[j]));
  return res;
}

CompareDesignsResult run_compare_designs(const ExperimentConfig& cfg,
                                         const std::string& out_dir) {
  ensure_dir(out_dir);
  Counters counters;
  Bench b = make_bench(cfg);
  Frozen f = make_frozen(cfg, b, &counters);

  const int n_w = cfg.get("oed.n_random_designs", 30);
  const int n_eval = cfg.get("oed.n_eval_samples", 50);
  const std::vector<double> gammas = cfg.get_list("oed.gammas", {0.008, 0.005});

  Vector d_truth = make_truth_data(cfg, b, &counters);
  std::vector<DataSample> fresh = generate_data_samples(
      *b.prior, b.scen, b.sensors, n_eval, cfg.seed(), &counters, "eval_draws",
      "eval_noise");

  CsvWriter csv(joined(out_dir, "designs.csv"), "compare_designs v1");
  csv.row("gamma", "design_id", "n_active", "E_rel", "trace", "V_bar", "E_bar");

  CompareDesignsResult result;
  const OedOptions oed_opts = cfg.oed_options();

  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    OedProblem prob(*b.prior, b.scen, b.sensors, f.samples, f.probes, oed_opts,
                    counters);
    OuterOptions oo = cfg.outer_options();
    oo.gamma = gammas[gi];
    OuterSolveRecord rec = solve_outer(prob, oo);
    const int n_active = count_active(rec.w_binary, 0.5);

    std::vector<Vector> designs;
    designs.push_back(rec.w_binary);
    auto rnd = random_designs(n_w, n_active, b.sensors.count(),
                              substream_seed(cfg.seed(), "designs", gi));
    designs.insert(designs.end(), rnd.begin(), rnd.end());

    CompareDesignsResult::Budget budget;
    budget.gamma = gammas[gi];
    budget.n_active = n_active;
    budget.n_random = n_w;

    std::vector<double> vbars(designs.size()), ebars(designs.size());
    for (std::size_t di = 0; di < designs.size(); ++di) {
      const Vector& w = designs[di];
      // reconstruction quality against the fixed truth data
      MapSolution sol = solve_map(*b.prior, b.scen, b.sensors, w, d_truth,
                                  b.prior->mean(), oed_opts.map, &counters);
      const double e_rel = relative_error(b.prior->mass(), sol.m, b.m_true);
      HessianContext ctx(*b.prior, sol.op, b.sensors, w, sol.u, sol.p,
                         oed_opts.mode);
      LinOp op = [&](const Vector& z) {
        return ctx.solve(b.prior->lumped().cwiseProduct(z), oed_opts.hess_rtol,
                         oed_opts.hess_maxiter, &counters)
            .x;
      };
      const double trace = estimate_trace(op, f.probes, b.prior->lumped());

      OedProblem::Performance perf = prob.expected_performance(w, fresh);
      vbars[di] = perf.v_bar;
      ebars[di] = perf.e_bar;
      csv.row(gammas[gi], di, count_active(w, 0.5), e_rel, trace, perf.v_bar,
              perf.e_bar);
    }

    budget.optimal_v_bar = vbars[0];
    budget.optimal_e_bar = ebars[0];
    for (std::size_t di = 1; di < designs.size(); ++di) {
      if (vbars[di] > vbars[0]) ++budget.better_v_than;
      if (ebars[di] < ebars[0]) ++budget.rank_e_bar;
    }
    result.budgets.push_back(budget);
  }
  write_counters_csv(joined(out_dir, "counters.csv"),
                     {{"compare_designs", counters.snapshot()}});
  return result;
}

std::vector<ScalingRow> run_scaling_study(const ExperimentConfig& cfg,
                                          ScalingSweep sweep,
                                          const std::string& out_dir) {
  ensure_dir(out_dir);
  std::vector<std::pair<int, int>> meshes;   // (nx, ny)
  std::vector<std::pair<int, int>> sensors;  // (sx, sy)
  if (sweep == ScalingSweep::ParamDim) {
    for (double g : cfg.get_list("scaling.param_grids", {22, 32, 45, 70}))
      meshes.emplace_back(static_cast<int>(g), static_cast<int>(g));
    sensors.assign(meshes.size(), {cfg.get("design.sensors_x", 10),
                                   cfg.get("design.sensors_y", 10)});
  } else {
    const int g = cfg.get("scaling.fixed_grid", 45);
    std::vector<double> flat =
        cfg.get_list("scaling.sensor_grids", {5, 2, 10, 10, 25, 10, 25, 20});
    for (std::size_t i = 0; i + 1 < flat.size(); i += 2)
      sensors.emplace_back(static_cast<int>(flat[i]),
                           static_cast<int>(flat[i + 1]));
    meshes.assign(sensors.size(), {g, g});
  }

  ExperimentConfig mod = cfg;
  mod.set("oed.n_d", std::to_string(cfg.get("scaling.n_d", 1)));
  mod.set("oed.n_tr", std::to_string(cfg.get("scaling.n_tr", 1)));

  CsvWriter csv(joined(out_dir, sweep == ScalingSweep::ParamDim
                                    ? "scaling_param.csv"
                                    : "scaling_sensor.csv"),
                "scaling v1");
  csv.row("n", "n_s", "inner_cg", "outer_cg", "newton", "forward_like",
          "oed_iters", "psi");

  std::vector<ScalingRow> rows;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    Counters counters;
    Bench b = make_bench(mod, meshes[i].first, meshes[i].second,
                         sensors[i].first, sensors[i].second);
    Frozen f = make_frozen(mod, b, &counters);
    OedProblem prob(*b.prior, b.scen, b.sensors, std::move(f.samples),
                    std::move(f.probes), mod.oed_options(), counters);

    // one objective+gradient evaluation with every sensor active
    const CounterSnapshot before = counters.snapshot();
    OedEval ev = prob.evaluate(Vector::Ones(b.sensors.count()), true);
    const CounterSnapshot eval_cost = counters.snapshot() - before;

    // short design solve for the quasi-Newton iteration count
    prob.reset_warm_starts();
    OuterOptions oo = mod.outer_options();
    oo.gamma = mod.get("scaling.gamma", 0.008);
    oo.eps_schedule.clear();  // single L1 stage
    const CounterSnapshot before_solve = counters.snapshot();
    solve_outer(prob, oo);
    const CounterSnapshot solve_cost = counters.snapshot() - before_solve;

    ScalingRow r;
    r.n = b.mesh->n_nodes();
    r.n_s = b.sensors.count();
    r.inner_cg = eval_cost.inner_cg;
    r.outer_cg = eval_cost.outer_cg;
    r.newton = eval_cost.newton;
    r.forward_like = eval_cost.forward_like;
    r.oed_iters = solve_cost.oed_iters;
    r.psi = ev.psi;
    rows.push_back(r);
    csv.row(r.n, r.n_s, r.inner_cg, r.outer_cg, r.newton, r.forward_like,
            r.oed_iters, r.psi);
  }
  return rows;
}

DeltaCheckResult run_delta_check(const ExperimentConfig& cfg,
                                 const std::string& out_dir) {
  ensure_dir(out_dir);
  const int grid = cfg.get("delta.grid", 9);  // (grid+1)^2 = 100 nodes
  Mesh mesh = build_rect_mesh(grid, grid, Rect{});
  PriorParams pp = cfg.prior_params(mesh);
  PriorModel prior(mesh, pp);
  Eigen::MatrixXd A = prior.dense_covariance();

  std::vector<double> deltas =
      cfg.get_list("delta.sweep", {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
  auto rows = delta_limit_check(A, deltas);

  CsvWriter csv(joined(out_dir, "delta.csv"), "delta_check v1");
  csv.row("delta", "trace_estimate", "exact_trace");
  for (const auto& r : rows) csv.row(r.delta, r.trace_estimate, r.exact_trace);

  DeltaCheckResult res;
  res.monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].trace_estimate < rows[i - 1].trace_estimate - 1e-12)
      res.monotone = false;
  res.final_deficit_rel =
      (rows.back().exact_trace - rows.back().trace_estimate) /
      rows.back().exact_trace;
  return res;
}

}  // namespace aoed
