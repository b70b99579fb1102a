#pragma once

#include <cstddef>
#include <vector>

#include "andersen/rng.hpp"

namespace andersen::detail {

// Common skeleton of the single and coupled simulators.  Alternates the
// deterministic flow with velocity refreshments at Poisson(lambda) times and
// reports states at the requested grid times.  Grid points inside a flow
// segment get the flowed (pre-jump) state; a grid point that coincides with
// a jump time records the post-jump state, matching right-continuity.
//
// Per event the draws are, in this order: exponential gap, particle index,
// n Gaussian components scaled to standard deviation sigma_v, acceptance
// variable u.  Both simulators consume the identical sequence, so a coupled
// run with the same stream reproduces the single-copy run bit for bit.
template <class State, class FlowFn, class JumpFn, class RecordFn>
void run_jump_process(State& y, double lambda, double t_end, std::size_t m, std::size_t n,
                      double sigma_v, const std::vector<double>& record, Rng& rng,
                      FlowFn&& flow_fn, JumpFn&& jump_fn, RecordFn&& record_fn) {
  double t = 0.0;
  std::size_t k = 0;
  std::vector<double> a(n);
  for (;;) {
    double t_jump = t + rng.exponential(lambda);
    if (t_jump >= t_end) {
      while (k < record.size() && record[k] <= t_end) {
        flow_fn(y, record[k] - t);
        t = record[k];
        record_fn(k, t, y);
        ++k;
      }
      flow_fn(y, t_end - t);
      return;
    }
    while (k < record.size() && record[k] < t_jump) {
      flow_fn(y, record[k] - t);
      t = record[k];
      record_fn(k, t, y);
      ++k;
    }
    flow_fn(y, t_jump - t);
    t = t_jump;
    std::size_t index = rng.uniform_index(m);
    for (std::size_t c = 0; c < n; ++c) a[c] = sigma_v * rng.normal();
    double u = rng.uniform();
    jump_fn(y, t, index, a, u);
    while (k < record.size() && record[k] == t) {
      record_fn(k, t, y);
      ++k;
    }
  }
}

}  // namespace andersen::detail
