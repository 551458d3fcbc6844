#include "aoed/oed.hpp"

#include <cmath>
#include <stdexcept>

#include "aoed/parallel.hpp"

namespace aoed {

OedProblem::OedProblem(const PriorModel& prior, const Scenario& scen,
                       const SensorArray& sensors,
                       std::vector<DataSample> samples, ProbeSet probes,
                       OedOptions opts, Counters& counters)
    : prior_(&prior),
      scen_(scen),
      sensors_(&sensors),
      samples_(std::move(samples)),
      probes_(std::move(probes)),
      opts_(opts),
      counters_(&counters) {
  if (samples_.empty()) throw std::invalid_argument("OedProblem: no data samples");
  if (probes_.count() == 0) throw std::invalid_argument("OedProblem: no probes");
  slots_.resize(samples_.size());
}

void OedProblem::reset_warm_starts() {
  for (auto& s : slots_) {
    s.m_warm.resize(0);
    s.g0_ref = -1.0;
  }
}

OedEval OedProblem::evaluate(const Vector& w, bool want_grad) {
  const int n_d = static_cast<int>(samples_.size());
  const int n_tr = probes_.count();
  const double scale = 1.0 / (static_cast<double>(n_d) * n_tr);
  const Mesh& mesh = prior_->mesh();
  const Vector& lumped = prior_->lumped();
  const CounterSnapshot before = counters_->snapshot();

  OedEval ev;
  ev.map.resize(n_d);
  ev.y.assign(n_d, {});
  ev.v.assign(n_d, {});
  ev.q.assign(n_d, {});
  std::vector<double> psi_i(n_d, 0.0);
  std::vector<Vector> grad_i(n_d);
  std::vector<char> ok(n_d, 1);

  parallel_for(n_d, opts_.threads, [&](int i) {
    Slot& slot = slots_[static_cast<std::size_t>(i)];
    MapOptions mo = opts_.map;
    mo.g0_ref = slot.g0_ref;
    const Vector m0 = slot.m_warm.size() ? slot.m_warm : prior_->mean();
    MapSolution sol =
        solve_map(*prior_, scen_, *sensors_, w, samples_[i].d, m0, mo, counters_);
    slot.m_warm = sol.m;
    if (slot.g0_ref < 0.0) slot.g0_ref = sol.g0_ref;
    if (!sol.converged) ok[i] = 0;

    HessianContext ctx(*prior_, sol.op, *sensors_, w, sol.u, sol.p, opts_.mode);

    auto& ys = ev.y[static_cast<std::size_t>(i)];
    ys.resize(n_tr);
    double acc = 0.0;
    for (int k = 0; k < n_tr; ++k) {
      const Vector& z = probes_.z[static_cast<std::size_t>(k)];
      Vector rhs = lumped.cwiseProduct(z);
      CgResult cg = ctx.solve(rhs, opts_.hess_rtol, opts_.hess_maxiter, counters_);
      ys[static_cast<std::size_t>(k)] = std::move(cg.x);
      acc += z.dot(lumped.cwiseProduct(ys[static_cast<std::size_t>(k)]));
    }
    psi_i[static_cast<std::size_t>(i)] = scale * acc;

    if (want_grad) {
      const SparseMat& C = ctx.block_C();
      const SparseMat& S = ctx.block_S();
      const StateOperator& A = *sol.op;
      const Vector& m = A.m();
      const Vector& u = sol.u;
      const Vector& p = sol.p;
      const bool full = opts_.mode == HessMode::Full;

      auto& vs = ev.v[static_cast<std::size_t>(i)];
      auto& qs = ev.q[static_cast<std::size_t>(i)];
      vs.resize(n_tr);
      qs.resize(n_tr);
      Vector b1 = Vector::Zero(mesh.n_nodes());
      Vector b2 = Vector::Zero(mesh.n_nodes());
      Vector b3 = Vector::Zero(mesh.n_nodes());
      Vector trace_term = Vector::Zero(sensors_->count());
      const Vector gamma_inv =
          sensors_->sigma.cwiseProduct(sensors_->sigma).cwiseInverse();

      for (int k = 0; k < n_tr; ++k) {
        const Vector& y = ys[static_cast<std::size_t>(k)];
        Vector v = A.solve_homogeneous(-(C * y).eval(), counters_);
        Vector rhs_q = ctx.apply_D(v);
        if (full) rhs_q += S.transpose() * y;
        Vector q = A.solve_homogeneous(-rhs_q, counters_);

        // b1: tested on state variations
        b1 += 2.0 * flux_test_vector(mesh, m, q, [&](int t) {
          return mesh.centroid_value(y, t);
        });
        if (full) {
          b1 += flux_test_vector(mesh, m, p, [&](int t) {
            const double yc = mesh.centroid_value(y, t);
            return yc * yc;
          });
        }
        // b2: tested on parameter variations
        b2 += 2.0 * load_test_vector(mesh, m, [&](int t) {
          return mesh.grad_on_tri(v, t).dot(mesh.grad_on_tri(q, t));
        });
        b2 += 2.0 * load_test_vector(mesh, m, [&](int t) {
          return mesh.centroid_value(y, t) *
                 mesh.grad_on_tri(u, t).dot(mesh.grad_on_tri(q, t));
        });
        if (full) {
          b2 += 2.0 * load_test_vector(mesh, m, [&](int t) {
            return mesh.centroid_value(y, t) *
                   mesh.grad_on_tri(v, t).dot(mesh.grad_on_tri(p, t));
          });
          b2 += load_test_vector(mesh, m, [&](int t) {
            const double yc = mesh.centroid_value(y, t);
            return yc * yc * mesh.grad_on_tri(u, t).dot(mesh.grad_on_tri(p, t));
          });
          // b3: tested on adjoint variations
          b3 += 2.0 * flux_test_vector(mesh, m, v, [&](int t) {
            return mesh.centroid_value(y, t);
          });
          b3 += flux_test_vector(mesh, m, u, [&](int t) {
            const double yc = mesh.centroid_value(y, t);
            return yc * yc;
          });
        }

        Vector bv = sensors_->B * v;
        trace_term += gamma_inv.cwiseProduct(bv).cwiseProduct(bv);

        vs[static_cast<std::size_t>(k)] = std::move(v);
        qs[static_cast<std::size_t>(k)] = std::move(q);
      }
      b1 *= scale;
      b2 *= scale;
      b3 *= scale;
      restrict_to_v0(mesh, b1);
      restrict_to_v0(mesh, b3);

      // bbar = b2 - C^T A^{-1} b1 - S A^{-1} b3 + C^T A^{-1} D A^{-1} b3,
      // then the design adjoints mhat and phat = A^{-1}(b3 - C mhat).
      Vector bbar = b2;
      bbar -= C.transpose() * A.solve_homogeneous(b1, counters_);
      if (full) {
        Vector t3 = A.solve_homogeneous(b3, counters_);
        bbar -= S * t3;
        bbar += C.transpose() * A.solve_homogeneous(ctx.apply_D(t3), counters_);
      }
      // The design-adjoint system inherits the full second-order blocks from
      // the MAP optimality conditions regardless of the trace mode.
      CgResult mh = ctx.solve(bbar, opts_.hess_rtol, opts_.hess_maxiter,
                              counters_, HessMode::Full, NegCurvature::Error);
      Vector rhs_ph = -(C * mh.x).eval();
      if (full) rhs_ph += b3;
      Vector phat = A.solve_homogeneous(rhs_ph, counters_);

      Vector misfit = sensors_->B * u - samples_[static_cast<std::size_t>(i)].d;
      Vector g = gamma_inv.cwiseProduct(misfit)
                     .cwiseProduct(sensors_->B * phat);
      const double vsign = opts_.debug_negate_vterm ? 1.0 : -1.0;
      g += vsign * scale * trace_term;
      grad_i[static_cast<std::size_t>(i)] = std::move(g);
    }
    ev.map[static_cast<std::size_t>(i)] = std::move(sol);
  });

  for (int i = 0; i < n_d; ++i) {
    ev.psi += psi_i[static_cast<std::size_t>(i)];
    if (!ok[static_cast<std::size_t>(i)]) ev.reliable = false;
  }
  if (want_grad) {
    ev.grad = Vector::Zero(sensors_->count());
    for (int i = 0; i < n_d; ++i) ev.grad += grad_i[static_cast<std::size_t>(i)];
  }
  ev.cost = counters_->snapshot() - before;
  return ev;
}

OedProblem::Performance OedProblem::expected_performance(
    const Vector& w, const std::vector<DataSample>& fresh) {
  const int n = static_cast<int>(fresh.size());
  if (n == 0) throw std::invalid_argument("expected_performance: no samples");
  const Vector& lumped = prior_->lumped();
  std::vector<double> tr(n, 0.0), er(n, 0.0);

  parallel_for(n, opts_.threads, [&](int i) {
    MapOptions mo = opts_.map;
    MapSolution sol = solve_map(*prior_, scen_, *sensors_, w, fresh[i].d,
                                prior_->mean(), mo, counters_);
    HessianContext ctx(*prior_, sol.op, *sensors_, w, sol.u, sol.p, opts_.mode);
    LinOp op = [&](const Vector& z) {
      return ctx.solve(lumped.cwiseProduct(z), opts_.hess_rtol,
                       opts_.hess_maxiter, counters_)
          .x;
    };
    tr[static_cast<std::size_t>(i)] = estimate_trace(op, probes_, lumped);
    er[static_cast<std::size_t>(i)] =
        relative_error(prior_->mass(), sol.m, fresh[static_cast<std::size_t>(i)].m_gen);
  });

  Performance perf;
  for (int i = 0; i < n; ++i) {
    perf.v_bar += tr[static_cast<std::size_t>(i)];
    perf.e_bar += er[static_cast<std::size_t>(i)];
  }
  perf.v_bar /= n;
  perf.e_bar /= n;
  return perf;
}

double adjoint_identity_error(const HessianContext& ctx, const Vector& z,
                              int n_d, int n_tr, double rtol,
                              Counters* counters) {
  const Mesh& mesh = ctx.op().mesh();
  const Vector& lumped = ctx.prior().lumped();
  const double c = static_cast<double>(n_d) * n_tr;
  const bool full = ctx.mode() == HessMode::Full;
  const SparseMat& C = ctx.block_C();
  const SparseMat& S = ctx.block_S();

  Vector rhs = lumped.cwiseProduct(z);
  // forward triple (v, y, q)
  Vector y = ctx.solve(rhs, rtol, 100000, counters).x;
  Vector v = ctx.op().solve_homogeneous(-(C * y).eval(), counters);
  Vector rq = ctx.apply_D(v);
  if (full) rq += S.transpose() * y;
  Vector q = ctx.op().solve_homogeneous(-rq, counters);

  // adjoint triple from the scaled right-hand side
  Vector yh = ctx.solve((-1.0 / c) * rhs, rtol, 100000, counters).x;
  Vector qh = ctx.op().solve_homogeneous(-(C * yh).eval(), counters);
  Vector rvh = ctx.apply_D(qh);
  if (full) rvh += S.transpose() * yh;
  Vector vh = ctx.op().solve_homogeneous(-rvh, counters);

  (void)mesh;
  auto rel = [](const Vector& a, const Vector& b) {
    const double den = std::max(b.norm(), 1e-300);
    return (a - b).norm() / den;
  };
  double err = rel(yh, (-1.0 / c) * y);
  err = std::max(err, rel(qh, (-1.0 / c) * v));
  err = std::max(err, rel(vh, (-1.0 / c) * q));
  return err;
}

}  // namespace aoed
