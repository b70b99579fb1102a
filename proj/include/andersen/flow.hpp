#pragma once

#include "andersen/geometry.hpp"
#include "andersen/potentials.hpp"

namespace andersen {

enum class FlowMode { Exact, Verlet };

struct FlowConfig {
  FlowMode mode = FlowMode::Exact;
  // Verlet step; a nonpositive value selects 1e-3 times the oscillation
  // period 2 pi / sqrt(stiffness) of the potential.
  double step = 0.0;
};

// Two coupled copies on Euclidean space, evolved with identical schedules.
struct CoupledPair {
  PhasePoint first;
  PhasePoint second;
};

// Coupled pair on the torus in difference coordinates: the first copy (x, v)
// with x wrapped to [0, ell), and the difference (z, w) where z lives on the
// covering line (never wrapped) and w = v - v_tilde.  The second copy is
// recovered by project().
struct TorusCoupledState {
  std::vector<double> x, v, z, w;
};

double hamiltonian(const PhasePoint& y, const Potential& U);

// Effective Verlet step for this potential/config pair.
double resolve_step(const Potential& U, const FlowConfig& cfg, double t);

// Advance by time t >= 0 under dx = v, dv = -grad U(x), in place.
// Exact mode requires U = 0 or a diagonal quadratic U on Euclidean space.
// Verlet takes floor(t/h) full steps and one partial step for the rest, so
// the target time is hit exactly.
void flow(PhasePoint& y, double t, const Potential& U, const SpaceSpec& space, const FlowConfig& cfg);

// Both copies advanced with the same scheme and step schedule.
void flow(CoupledPair& y, double t, const Potential& U, const SpaceSpec& space, const FlowConfig& cfg);

// Joint system dx = v, dv = -grad U(x), dz = w,
// dw = grad U(translate(x, -z)) - grad U(x); one Verlet step integrates all
// four blocks with (x, z) as positions, sharing the gradient at x.
void flow(TorusCoupledState& y, double t, const Potential& U, const SpaceSpec& space, const FlowConfig& cfg);

// ((x, v), (translate(x, -z), v - w)): the two marginal copies.
CoupledPair project(const TorusCoupledState& y, const SpaceSpec& space);

}  // namespace andersen
