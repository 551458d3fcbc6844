#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "aoed/csv.hpp"
#include "aoed/drivers.hpp"

namespace aoed {

namespace {

struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  bool bigger_is_better = false;  // mutation detection wants a LARGE error
};

Check make_check(std::string name, double value, double tol,
                 bool bigger_is_better = false) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.tol = tol;
  c.bigger_is_better = bigger_is_better;
  c.pass = bigger_is_better ? value > tol : value <= tol;
  return c;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

double rel_err(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace

GradcheckResult run_gradcheck(const ExperimentConfig& cfg,
                              const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  Counters counters;
  std::vector<Check> checks;
  const std::uint64_t seed = cfg.seed();

  // ---- inner-problem checks on a coarse mesh ----
  {
    ExperimentConfig c0 = cfg;
    c0.set("mesh.nx", std::to_string(cfg.get("gradcheck.nx", 12)));
    c0.set("mesh.ny", std::to_string(cfg.get("gradcheck.ny", 12)));
    c0.set("design.sensors_x", "4");
    c0.set("design.sensors_y", "4");
    Mesh mesh = c0.build_mesh();
    Scenario scen = c0.build_scenario();
    PriorModel prior(mesh, c0.prior_params(mesh));
    SensorArray sensors = make_sensor_grid(mesh, 4, 4, c0.get("design.sigma", 0.05));
    std::vector<DataSample> data =
        generate_data_samples(prior, scen, sensors, 1, seed, &counters);
    const Vector& d = data[0].d;
    const Vector w = Vector::Ones(sensors.count());

    Vector m0 = prior.mean() +
                0.7 * (prior.sample(substream_seed(seed, "gradcheck_point")) -
                       prior.mean());
    Vector u0, p0;
    Vector g0 = eval_map_gradient(prior, scen, sensors, w, d, m0, &counters,
                                  &u0, &p0);

    const std::vector<double> hs{1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5};
    double worst_grad = 0.0;
    for (int r = 0; r < 3; ++r) {
      Vector dir = prior.sample(substream_seed(seed, "gradcheck_dir", r)) -
                   prior.mean();
      dir /= prior.dual_norm(prior.precision_dual(dir));
      const double slope = g0.dot(dir);
      double best = 1e300;
      for (double h : hs) {
        const double jp = eval_cost(prior, scen, sensors, w, d, m0 + h * dir, &counters);
        const double jm = eval_cost(prior, scen, sensors, w, d, m0 - h * dir, &counters);
        best = std::min(best, rel_err((jp - jm) / (2.0 * h), slope));
      }
      worst_grad = std::max(worst_grad, best);
    }
    checks.push_back(make_check("map_gradient_fd", worst_grad, 1e-5));

    auto op0 = std::make_shared<const StateOperator>(mesh, m0, scen);
    HessianContext ctx(prior, op0, sensors, w, u0, p0, HessMode::Full);
    double worst_hess = 0.0;
    for (int r = 0; r < 2; ++r) {
      Vector dir = prior.sample(substream_seed(seed, "gradcheck_hdir", r)) -
                   prior.mean();
      dir /= prior.dual_norm(prior.precision_dual(dir));
      Vector hv = ctx.apply_dual(dir, &counters);
      double best = 1e300;
      for (double h : {3e-3, 1e-3, 3e-4, 1e-4}) {
        Vector gp = eval_map_gradient(prior, scen, sensors, w, d,
                                      m0 + h * dir, &counters);
        Vector gm = eval_map_gradient(prior, scen, sensors, w, d,
                                      m0 - h * dir, &counters);
        best = std::min(best, rel_err(((gp - gm) / (2.0 * h)).eval(), hv));
      }
      worst_hess = std::max(worst_hess, best);
    }
    checks.push_back(make_check("hessian_fd", worst_hess, 1e-6));

    double worst_sym = 0.0, worst_routes = 0.0;
    for (int r = 0; r < 5; ++r) {
      Vector y = prior.sample(substream_seed(seed, "gradcheck_y", r)) - prior.mean();
      Vector z = prior.sample(substream_seed(seed, "gradcheck_z", r)) - prior.mean();
      Vector hy = ctx.apply_dual(y, &counters);
      Vector hz = ctx.apply_dual(z, &counters);
      worst_sym = std::max(worst_sym, rel_err(hy.dot(z), y.dot(hz)));
      worst_routes =
          std::max(worst_routes, rel_err(ctx.apply_dual_reduced(y, &counters), hy));
    }
    checks.push_back(make_check("hessian_symmetry", worst_sym, 1e-10));
    checks.push_back(make_check("hessian_routes", worst_routes, 1e-9));
  }

  // ---- design-gradient checks on a small 3-sensor problem ----
  {
    ExperimentConfig c1 = cfg;
    c1.set("mesh.nx", std::to_string(cfg.get("gradcheck.oed_nx", 16)));
    c1.set("mesh.ny", std::to_string(cfg.get("gradcheck.oed_ny", 16)));
    c1.set("design.sensors_x", "3");
    c1.set("design.sensors_y", "1");
    c1.set("oed.n_d", "2");
    c1.set("oed.n_tr", "3");
    Mesh mesh = c1.build_mesh();
    Scenario scen = c1.build_scenario();
    PriorModel prior(mesh, c1.prior_params(mesh));
    SensorArray sensors = make_sensor_grid(mesh, 3, 1, c1.get("design.sigma", 0.05));

    OedOptions opts = c1.oed_options();
    opts.map.rtol = 1e-10;
    opts.map.atol = 1e-12;
    opts.hess_rtol = 1e-12;
    opts.hess_maxiter = 100000;

    std::vector<DataSample> samples =
        generate_data_samples(prior, scen, sensors, 2, seed, &counters);
    ProbeSet probes = make_probes(prior.lumped(), 3, substream_seed(seed, "probes"));

    const Vector w0 = Vector::Constant(sensors.count(), 0.6);
    const std::vector<double> hs{1e-3, 1e-4};

    for (HessMode mode : {HessMode::Full, HessMode::GaussNewton}) {
      const char* tag = mode == HessMode::Full ? "full" : "gn";
      OedOptions mopts = opts;
      mopts.mode = mode;
      OedProblem prob(prior, scen, sensors, samples, probes, mopts, counters);
      OedEval ev = prob.evaluate(w0, true);

      double worst = 0.0;
      for (int j = 0; j < sensors.count(); ++j) {
        double best = 1e300;
        for (double h : hs) {
          Vector wp = w0, wm = w0;
          wp[j] += h;
          wm[j] -= h;
          const double pp = prob.evaluate(wp, false).psi;
          const double pm = prob.evaluate(wm, false).psi;
          best = std::min(best, rel_err((pp - pm) / (2.0 * h), ev.grad[j]));
        }
        worst = std::max(worst, best);
      }
      checks.push_back(make_check(std::string("oed_gradient_fd_") + tag, worst, 1e-4));

      // adjoint-variable relations against the trace intermediates
      MapSolution sol = solve_map(prior, scen, sensors, w0, samples[0].d,
                                  prior.mean(), mopts.map, &counters);
      HessianContext ctx(prior, sol.op, sensors, w0, sol.u, sol.p, mode);
      const double iderr = adjoint_identity_error(ctx, probes.z[0], 2, 3, 1e-13,
                                                  &counters);
      checks.push_back(make_check(std::string("adjoint_identity_") + tag, iderr, 1e-10));
    }

    // a deliberately mutated trace-term sign must be caught by the FD test
    {
      OedOptions bad = opts;
      bad.debug_negate_vterm = true;
      OedProblem prob(prior, scen, sensors, samples, probes, bad, counters);
      OedEval ev = prob.evaluate(w0, true);
      double worst = 0.0;
      for (int j = 0; j < sensors.count(); ++j) {
        Vector wp = w0, wm = w0;
        wp[j] += 1e-4;
        wm[j] -= 1e-4;
        const double pp = prob.evaluate(wp, false).psi;
        const double pm = prob.evaluate(wm, false).psi;
        worst = std::max(worst, rel_err((pp - pm) / 2e-4, ev.grad[j]));
      }
      checks.push_back(make_check("mutation_detected", worst, 1e-2, true));
    }
  }

  CsvWriter csv((std::filesystem::path(out_dir) / "gradcheck.csv").string(),
                "gradcheck v1");
  csv.row("check", "value", "tol", "pass");
  GradcheckResult res;
  for (const auto& c : checks) {
    csv.row(c.name, c.value, c.tol, c.pass ? 1 : 0);
    std::printf("[%s] %-24s value %.3e  tol %s %.1e\n",
                c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.bigger_is_better ? ">" : "<=", c.tol);
    ++res.n_checks;
    if (!c.pass) ++res.n_failed;
  }
  return res;
}

}  // namespace aoed
