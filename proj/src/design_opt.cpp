#include "aoed/design_opt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aoed {

PenaltyEval penalty_eval(const Vector& w, const PenaltySpec& spec) {
  PenaltyEval out;
  out.grad.resize(w.size());
  if (spec.family == PenaltyFamily::L1) {
    out.value = w.sum();
    out.grad.setOnes();
    return out;
  }
  if (!(spec.eps > 0.0)) throw std::invalid_argument("penalty_eval: eps must be positive");
  out.value = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double t = w[j];
    out.value += t / (t + spec.eps);
    out.grad[j] = spec.eps / ((t + spec.eps) * (t + spec.eps));
  }
  return out;
}

int count_active(const Vector& w, double threshold) {
  int n = 0;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w[j] > threshold) ++n;
  return n;
}

namespace {

// Objective pieces at a design point; the barrier is assembled on top per mu
// so changing mu does not trigger a re-evaluation.
struct BarrierEval {
  Vector w;
  double psi = 0.0;
  double penalty = 0.0;
  double objective = 0.0;  // psi + gamma P
  Vector grad_objective;
  double barrier = 0.0;
  Vector grad_barrier;
  double phi = 0.0;  // objective + mu * barrier
  Vector grad_phi;

  void set_mu(double mu) {
    phi = objective + mu * barrier;
    grad_phi = grad_objective + mu * grad_barrier;
  }
};

BarrierEval eval_point(OedProblem& prob, Vector w, double gamma,
                       const PenaltySpec& pen, double mu) {
  BarrierEval ev;
  OedEval oe = prob.evaluate(w, true);
  PenaltyEval pe = penalty_eval(w, pen);
  ev.psi = oe.psi;
  ev.penalty = pe.value;
  ev.objective = oe.psi + gamma * pe.value;
  ev.grad_objective = oe.grad + gamma * pe.grad;
  ev.barrier = 0.0;
  ev.grad_barrier.resize(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    ev.barrier += -std::log(w[j]) - std::log(1.0 - w[j]);
    ev.grad_barrier[j] = -1.0 / w[j] + 1.0 / (1.0 - w[j]);
  }
  ev.w = std::move(w);
  ev.set_mu(mu);
  return ev;
}

double projected_gradient_norm(const Vector& w, const Vector& g) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double pj = w[j] - std::min(1.0, std::max(0.0, w[j] - g[j]));
    acc += pj * pj;
  }
  return std::sqrt(acc);
}

// Largest step keeping w + a*d strictly inside (0,1), scaled back by the
// fraction-to-boundary rule.
double max_feasible_step(const Vector& w, const Vector& d, double fraction) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (d[j] < 0.0) a = std::min(a, -w[j] / d[j]);
    if (d[j] > 0.0) a = std::min(a, (1.0 - w[j]) / d[j]);
  }
  return std::isfinite(a) ? fraction * a : 1.0;
}

class Lbfgs {
 public:
  explicit Lbfgs(int mem) : mem_(mem) {}

  void push(const Vector& s, const Vector& y) {
    const double sy = s.dot(y);
    if (sy <= 1e-12 * s.norm() * y.norm()) return;  // skip bad curvature pairs
    s_.push_back(s);
    y_.push_back(y);
    rho_.push_back(1.0 / sy);
    if (static_cast<int>(s_.size()) > mem_) {
      s_.pop_front();
      y_.pop_front();
      rho_.pop_front();
    }
  }

  void reset() {
    s_.clear();
    y_.clear();
    rho_.clear();
  }

  Vector direction(const Vector& g) const {
    Vector q = -g;
    const int k = static_cast<int>(s_.size());
    std::vector<double> alpha(k);
    for (int i = k - 1; i >= 0; --i) {
      alpha[i] = rho_[i] * s_[i].dot(q);
      q -= alpha[i] * y_[i];
    }
    if (k > 0) {
      const double gamma = s_[k - 1].dot(y_[k - 1]) / y_[k - 1].squaredNorm();
      q *= gamma;
    }
    for (int i = 0; i < k; ++i) {
      const double beta = rho_[i] * y_[i].dot(q);
      q += (alpha[i] - beta) * s_[i];
    }
    return q;
  }

 private:
  int mem_;
  std::deque<Vector> s_, y_;
  std::deque<double> rho_;
};

}  // namespace

OuterSolveRecord solve_outer(OedProblem& problem, const OuterOptions& opts) {
  const int n_s = problem.n_sensors();
  const CounterSnapshot before = problem.counters().snapshot();

  Vector w = opts.w0.size() ? opts.w0 : Vector::Constant(n_s, 0.5);
  for (Eigen::Index j = 0; j < w.size(); ++j)
    w[j] = std::min(1.0 - 1e-3, std::max(1e-3, w[j]));

  OuterSolveRecord rec;

  std::vector<PenaltySpec> stages;
  stages.push_back({PenaltyFamily::L1, 0.0});
  for (double e : opts.eps_schedule) stages.push_back({PenaltyFamily::EpsFamily, e});

  for (std::size_t s = 0; s < stages.size(); ++s) {
    const PenaltySpec& pen = stages[s];
    StageRecord sr;
    sr.stage = static_cast<int>(s);
    sr.family = pen.family;
    sr.eps = pen.eps;

    int budget = opts.stage_max_iters;
    double pg0 = -1.0;
    BarrierEval ev = eval_point(problem, w, opts.gamma, pen, opts.mu_schedule.front());
    for (std::size_t mi = 0; mi < opts.mu_schedule.size() && budget > 0; ++mi) {
      const double mu = opts.mu_schedule[mi];
      Lbfgs lbfgs(opts.lbfgs_mem);
      ev.set_mu(mu);
      if (pg0 < 0.0)
        pg0 = std::max(projected_gradient_norm(w, ev.grad_objective), 1e-300);
      // solve the barrier subproblem roughly to O(mu)
      const double mu_tol = 0.5 * mu * std::sqrt(static_cast<double>(n_s));
      while (budget > 0) {
        const double pg = projected_gradient_norm(w, ev.grad_objective);
        sr.proj_grad_rel = pg / pg0;
        if (sr.proj_grad_rel <= opts.stage_tol) {
          sr.converged = true;
          break;
        }
        if (ev.grad_phi.norm() <= mu_tol) break;

        Vector dir = lbfgs.direction(ev.grad_phi);
        double slope = ev.grad_phi.dot(dir);
        if (!(slope < 0.0)) {
          lbfgs.reset();
          dir = -ev.grad_phi;
          slope = ev.grad_phi.dot(dir);
        }
        const double amax = max_feasible_step(w, dir, opts.boundary_fraction);
        double step = std::min(1.0, amax);
        bool accepted = false;
        BarrierEval trial;
        for (int bt = 0; bt < 30 && step > 1e-16; ++bt) {
          trial = eval_point(problem, w + step * dir, opts.gamma, pen, mu);
          if (trial.phi <= ev.phi + 1e-4 * step * slope) {
            accepted = true;
            break;
          }
          step *= 0.5;
        }
        if (!accepted) {
          lbfgs.reset();
          break;  // give up on this mu; continuation proceeds
        }
        lbfgs.push(trial.w - w, trial.grad_phi - ev.grad_phi);
        w = trial.w;
        ev = std::move(trial);
        --budget;
        sr.iters += 1;
        problem.counters().add_oed_iter();
        if (opts.on_iteration)
          opts.on_iteration(sr.stage, pen.family, pen.eps, sr.iters, mu, ev.phi,
                            ev.psi, ev.penalty,
                            projected_gradient_norm(w, ev.grad_objective) / pg0);
      }
      if (sr.converged) break;
    }

    sr.psi = ev.psi;
    sr.penalty_value = ev.penalty;
    sr.n_active = count_active(w, opts.active_threshold);
    sr.w = w;
    if (!sr.converged) rec.all_stages_converged = false;
    rec.stages.push_back(std::move(sr));
  }

  rec.w_final = w;
  rec.w_binary = w;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    rec.w_binary[j] = w[j] >= 0.5 ? 1.0 : 0.0;
  rec.n_active = count_active(w, opts.active_threshold);
  rec.cost = problem.counters().snapshot() - before;
  return rec;
}

std::vector<Vector> random_designs(int n_w, int n_active, int n_s,
                                   std::uint64_t seed) {
  if (n_active > n_s)
    throw std::invalid_argument("random_designs: n_active exceeds sensor count");
  std::vector<Vector> out;
  out.reserve(n_w);
  for (int t = 0; t < n_w; ++t) {
    NormalStream rng(substream_seed(seed, "random_designs", t));
    std::vector<int> idx(n_s);
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates
    for (int k = 0; k < n_active; ++k) {
      const int r = k + static_cast<int>(rng.uniform() * (n_s - k));
      std::swap(idx[k], idx[std::min(r, n_s - 1)]);
    }
    Vector w = Vector::Zero(n_s);
    for (int k = 0; k < n_active; ++k) w[idx[k]] = 1.0;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace aoed
