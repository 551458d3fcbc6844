// Command-line front end. Links only the shared C API.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoed/aoed.h"

namespace {

struct SessionCloser {
  void operator()(aoed_session* s) const { aoed_session_close(s); }
};
using SessionPtr = std::unique_ptr<aoed_session, SessionCloser>;

int report(aoed_session* s, aoed_status st, const char* what) {
  if (st == AOED_OK) return 0;
  std::fprintf(stderr, "aoed %s: %s", what, aoed_status_string(st));
  const char* msg = aoed_session_last_error(s);
  if (msg && msg[0]) std::fprintf(stderr, " (%s)", msg);
  std::fprintf(stderr, "\n");
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A-optimal sensor placement for elliptic coefficient inversion"};
  app.require_subcommand(1);

  std::string config, out = "out";
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config, "configuration file");
  app.add_option("-o,--out", out, "output directory");
  app.add_option("-s,--set", overrides, "config override key=value")
      ->take_all();

  std::string sweep = "param";
  auto* cmd_forward = app.add_subcommand("forward", "solve the state equation at the truth field");
  auto* cmd_map = app.add_subcommand("map", "reconstruct the parameter from truth data");
  auto* cmd_eval = app.add_subcommand("oed-eval", "evaluate the design objective and gradient");
  auto* cmd_solve = app.add_subcommand("oed-solve", "optimize the sensor design with continuation");
  auto* cmd_compare = app.add_subcommand("compare-designs", "optimal vs random designs cloud data");
  auto* cmd_scaling = app.add_subcommand("scaling-study", "solver-cost sweep over problem dimensions");
  cmd_scaling->add_option("--sweep", sweep, "param | sensor")->check(CLI::IsMember({"param", "sensor"}));
  auto* cmd_gradcheck = app.add_subcommand("gradcheck", "finite-difference verification suites");
  auto* cmd_delta = app.add_subcommand("delta-check", "smoothed trace-estimator limit table");

  CLI11_PARSE(app, argc, argv);

  aoed_session* raw = nullptr;
  aoed_status st = aoed_session_open(config.c_str(), &raw);
  if (st != AOED_OK) {
    std::fprintf(stderr, "aoed: cannot load config '%s': %s\n", config.c_str(),
                 aoed_status_string(st));
    return 1;
  }
  SessionPtr session(raw);

  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "aoed: bad --set '%s' (expected key=value)\n", kv.c_str());
      return 1;
    }
    aoed_session_set(session.get(), kv.substr(0, eq).c_str(),
                     kv.substr(eq + 1).c_str());
  }

  if (cmd_forward->parsed())
    return report(session.get(), aoed_run_forward(session.get(), out.c_str()), "forward");
  if (cmd_map->parsed())
    return report(session.get(), aoed_run_map(session.get(), out.c_str()), "map");
  if (cmd_eval->parsed()) {
    const int rc = report(session.get(), aoed_run_oed_eval(session.get(), out.c_str()), "oed-eval");
    double psi = 0.0;
    if (rc == 0 && aoed_last_objective(session.get(), &psi) == AOED_OK)
      std::printf("psi_hat = %.12g\n", psi);
    return rc;
  }
  if (cmd_solve->parsed())
    return report(session.get(), aoed_run_oed_solve(session.get(), out.c_str()), "oed-solve");
  if (cmd_compare->parsed())
    return report(session.get(), aoed_run_compare_designs(session.get(), out.c_str()),
                  "compare-designs");
  if (cmd_scaling->parsed())
    return report(session.get(),
                  aoed_run_scaling_study(session.get(), sweep.c_str(), out.c_str()),
                  "scaling-study");
  if (cmd_gradcheck->parsed()) {
    int n_failed = 0;
    const aoed_status rc = aoed_run_gradcheck(session.get(), out.c_str(), &n_failed);
    if (rc != AOED_OK && n_failed == 0)
      return report(session.get(), rc, "gradcheck");
    return n_failed == 0 ? 0 : 2;
  }
  if (cmd_delta->parsed())
    return report(session.get(), aoed_run_delta_check(session.get(), out.c_str()),
                  "delta-check");
  return 1;
}
