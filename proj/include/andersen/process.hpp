#pragma once

#include <functional>

#include "andersen/flow.hpp"
#include "andersen/geometry.hpp"
#include "andersen/potentials.hpp"
#include "andersen/rng.hpp"

namespace andersen {

// One velocity refreshment: at time t, particle `index` had its velocity
// block replaced by `a` (already scaled to variance 1/beta per component).
// The acceptance variable u is drawn per event in any case; only couplings
// consume it.
struct JumpEvent {
  double t = 0.0;
  std::size_t index = 0;
  std::vector<double> a;
  double u = 0.0;
};

struct AndersenConfig {
  double lambda = 1.0;  // refreshment rate
  double beta = 1.0;    // inverse temperature
  double t_end = 0.0;
  FlowConfig flow;

  void validate() const;
};

// Jump times of a Poisson(lambda) clock on [0, t_end], strictly increasing.
std::vector<double> jump_skeleton(double lambda, double t_end, Rng& rng);

// Replace the n-component velocity block of one particle.
void velocity_substitution(std::vector<double>& v, std::size_t index, const std::vector<double>& a,
                           std::size_t n);

using RecordCallback = std::function<void(std::size_t k, double t, const PhasePoint&)>;
using JumpCallback =
    std::function<void(const JumpEvent&, const PhasePoint& before, const PhasePoint& after)>;

// Event-driven simulation: Hamiltonian flow between Poisson jump times, one
// particle's velocity redrawn at each jump.  States at the record times
// (sorted, within [0, t_end]) are reported through on_record; values at grid
// points are right-continuous (post-jump if a grid time ties with a jump).
// Draws come in the fixed per-event order documented in rng.hpp.
void simulate_andersen(PhasePoint& y, const SpaceSpec& space, const Potential& U,
                       const AndersenConfig& cfg, const std::vector<double>& record, Rng& rng,
                       const RecordCallback& on_record, const JumpCallback& on_jump = {});

// Convenience wrapper collecting the recorded states.
std::vector<PhasePoint> simulate_andersen(PhasePoint y0, const SpaceSpec& space, const Potential& U,
                                          const AndersenConfig& cfg,
                                          const std::vector<double>& record, Rng& rng);

}  // namespace andersen
