#pragma once

#include <atomic>

namespace aoed {

// Snapshot of the solve ledger. "Forward-like" counts every elliptic state,
// adjoint, or incremental solve; prior-operator and mass solves are never
// forward-like. map_state_solves / map_adjoint_solves break out the state and
// adjoint solves spent inside MAP solves (including line-search trials), which
// makes the ledger reconcile exactly against the algorithmic cost formula.
struct CounterSnapshot {
  long forward_like = 0;
  long inner_cg = 0;
  long outer_cg = 0;
  long newton = 0;
  long oed_iters = 0;
  long map_state_solves = 0;
  long map_adjoint_solves = 0;

  CounterSnapshot operator-(const CounterSnapshot& o) const {
    CounterSnapshot d;
    d.forward_like = forward_like - o.forward_like;
    d.inner_cg = inner_cg - o.inner_cg;
    d.outer_cg = outer_cg - o.outer_cg;
    d.newton = newton - o.newton;
    d.oed_iters = oed_iters - o.oed_iters;
    d.map_state_solves = map_state_solves - o.map_state_solves;
    d.map_adjoint_solves = map_adjoint_solves - o.map_adjoint_solves;
    return d;
  }
};

// Shared ledger; atomic so that concurrent per-sample solves aggregate
// correctly. Values are monotonically nondecreasing.
class Counters {
 public:
  void add_forward_like(long n = 1) { forward_like_.fetch_add(n, std::memory_order_relaxed); }
  void add_inner_cg(long n) { inner_cg_.fetch_add(n, std::memory_order_relaxed); }
  void add_outer_cg(long n) { outer_cg_.fetch_add(n, std::memory_order_relaxed); }
  void add_newton(long n = 1) { newton_.fetch_add(n, std::memory_order_relaxed); }
  void add_oed_iter(long n = 1) { oed_iters_.fetch_add(n, std::memory_order_relaxed); }
  void add_map_state(long n = 1) { map_state_solves_.fetch_add(n, std::memory_order_relaxed); }
  void add_map_adjoint(long n = 1) { map_adjoint_solves_.fetch_add(n, std::memory_order_relaxed); }

  CounterSnapshot snapshot() const {
    CounterSnapshot s;
    s.forward_like = forward_like_.load(std::memory_order_relaxed);
    s.inner_cg = inner_cg_.load(std::memory_order_relaxed);
    s.outer_cg = outer_cg_.load(std::memory_order_relaxed);
    s.newton = newton_.load(std::memory_order_relaxed);
    s.oed_iters = oed_iters_.load(std::memory_order_relaxed);
    s.map_state_solves = map_state_solves_.load(std::memory_order_relaxed);
    s.map_adjoint_solves = map_adjoint_solves_.load(std::memory_order_relaxed);
    return s;
  }

 private:
  std::atomic<long> forward_like_{0};
  std::atomic<long> inner_cg_{0};
  std::atomic<long> outer_cg_{0};
  std::atomic<long> newton_{0};
  std::atomic<long> oed_iters_{0};
  std::atomic<long> map_state_solves_{0};
  std::atomic<long> map_adjoint_solves_{0};
};

enum class CgTag { None, Inner, Outer };

}  // namespace aoed
