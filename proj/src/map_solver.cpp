#include "aoed/map_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace aoed {

namespace {

double misfit_term(const SensorArray& sensors, const Vector& w, const Vector& u,
                   const Vector& d) {
  const Vector wsig = sensors.w_sigma(w);
  Vector r = sensors.B * u - d;
  return 0.5 * r.dot(wsig.cwiseProduct(r));
}

double prior_term(const PriorModel& prior, const Vector& m) {
  Vector dm = m - prior.mean();
  return 0.5 * dm.dot(prior.precision_dual(dm));
}

// misfit part of the gradient: <mt e^m grad u, grad p>
Vector misfit_gradient(const Mesh& mesh, const Vector& m, const Vector& u,
                       const Vector& p) {
  return load_test_vector(mesh, m, [&](int t) {
    return mesh.grad_on_tri(u, t).dot(mesh.grad_on_tri(p, t));
  });
}

}  // namespace

double eval_cost(const PriorModel& prior, const Scenario& scen,
                 const SensorArray& sensors, const Vector& w, const Vector& d,
                 const Vector& m, Counters* counters) {
  StateOperator op(prior.mesh(), m, scen);
  Vector u = op.solve_state(counters);
  if (counters) counters->add_map_state();
  return misfit_term(sensors, w, u, d) + prior_term(prior, m);
}

Vector eval_map_gradient(const PriorModel& prior, const Scenario& scen,
                         const SensorArray& sensors, const Vector& w,
                         const Vector& d, const Vector& m, Counters* counters,
                         Vector* u_out, Vector* p_out) {
  StateOperator op(prior.mesh(), m, scen);
  Vector u = op.solve_state(counters);
  if (counters) counters->add_map_state();
  Vector p = solve_adjoint(op, sensors, w, u, d, counters);
  if (counters) counters->add_map_adjoint();
  Vector g = prior.precision_dual(m - prior.mean());
  g += misfit_gradient(prior.mesh(), m, u, p);
  if (u_out) *u_out = std::move(u);
  if (p_out) *p_out = std::move(p);
  return g;
}

MapSolution solve_map(const PriorModel& prior, const Scenario& scen,
                      const SensorArray& sensors, const Vector& w,
                      const Vector& d, const Vector& m_init,
                      const MapOptions& opts, Counters* counters) {
  const Mesh& mesh = prior.mesh();
  MapSolution sol;
  sol.m = m_init;

  auto op = std::make_shared<const StateOperator>(mesh, sol.m, scen);
  sol.u = op->solve_state(counters);
  if (counters) counters->add_map_state();
  double J = misfit_term(sensors, w, sol.u, d) + prior_term(prior, sol.m);
  sol.cost_history.push_back(J);

  sol.p = solve_adjoint(*op, sensors, w, sol.u, d, counters);
  if (counters) counters->add_map_adjoint();
  Vector g = prior.precision_dual(sol.m - prior.mean()) +
             misfit_gradient(mesh, sol.m, sol.u, sol.p);
  double gnorm = prior.dual_norm(g);

  const double g0 = opts.g0_ref > 0.0 ? opts.g0_ref : std::max(gnorm, 1e-300);
  sol.g0_ref = g0;
  const double tol = std::max(opts.atol, opts.rtol * g0);

  while (sol.newton_iters < opts.max_newton) {
    if (gnorm <= tol) {
      sol.converged = true;
      break;
    }
    const HessMode mode = (sol.newton_iters < opts.gn_iters)
                              ? HessMode::GaussNewton
                              : opts.late_mode;
    HessianContext ctx(prior, op, sensors, w, sol.u, sol.p, mode);

    const double forcing =
        std::min(opts.forcing_cap, std::sqrt(gnorm / std::max(g0, 1e-300)));
    CgResult cg = ctx.solve(-g, forcing, opts.cg_maxiter, counters, mode,
                            NegCurvature::Truncate);
    sol.inner_cg_iters += cg.iters;
    Vector dir = std::move(cg.x);

    double slope = g.dot(dir);
    if (!(slope < 0.0)) {  // not a descent direction; steepest in C_pr metric
      dir = -prior.covariance_from_dual(g);
      slope = g.dot(dir);
    }

    double step = 1.0;
    bool accepted = false;
    std::shared_ptr<const StateOperator> op_t;
    Vector u_t;
    double J_t = 0.0;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      Vector m_t = sol.m + step * dir;
      op_t = std::make_shared<const StateOperator>(mesh, m_t, scen);
      u_t = op_t->solve_state(counters);
      if (counters) counters->add_map_state();
      J_t = misfit_term(sensors, w, u_t, d) + prior_term(prior, m_t);
      if (J_t <= J + opts.armijo_c * step * slope) {
        sol.m = std::move(m_t);
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) break;  // line-search failure; return best iterate, flagged

    op = op_t;
    sol.u = std::move(u_t);
    J = J_t;
    sol.cost_history.push_back(J);
    sol.newton_iters += 1;
    if (counters) counters->add_newton();

    sol.p = solve_adjoint(*op, sensors, w, sol.u, d, counters);
    if (counters) counters->add_map_adjoint();
    g = prior.precision_dual(sol.m - prior.mean()) +
        misfit_gradient(mesh, sol.m, sol.u, sol.p);
    gnorm = prior.dual_norm(g);
  }
  if (!sol.converged && gnorm <= tol) sol.converged = true;

  sol.op = op;
  sol.cost = J;
  sol.grad_norm = gnorm;
  return sol;
}

double relative_error(const SparseMat& mass, const Vector& m,
                      const Vector& m_ref) {
  const double ref = std::sqrt(m_ref.dot(mass * m_ref));
  if (ref == 0.0) throw std::invalid_argument("relative_error: zero reference norm");
  Vector diff = m - m_ref;
  return std::sqrt(diff.dot(mass * diff)) / ref;
}

}  // namespace aoed
