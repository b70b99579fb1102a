#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "andersen/coupling.hpp"
#include "andersen/metrics.hpp"

namespace andersen {

// Pointwise Monte Carlo estimate of a trajectory functional: at each record
// time, the mean over replicas, the standard error of that mean, and the
// number of replicas that contributed.
struct EstimateSeries {
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> se;
  std::vector<std::size_t> count;
};

// Uniform grid 0, dt, ..., ending exactly at t_end when dt divides it.
std::vector<double> make_grid(double t_end, double dt);

enum class DistanceKind { WahRhoSquared, TorusRho, TorusRhoSimple };

// How the two copies start out:
//   Antipodal        torus only; z_i = ell/2, w = 0 (the farthest pair),
//                    x uniform on the torus, v at its equilibrium law
//   Offset           first copy displaced by `offset` in every coordinate,
//                    both velocities equal
//   StationaryVsPoint  first copy drawn from the equilibrium law (uniform /
//                    Gaussian positions as the potential dictates), second
//                    copy at the origin at rest
enum class InitialKind { Antipodal, Offset, StationaryVsPoint };

struct ExperimentSpec {
  SpaceSpec space;
  CouplingConfig coupling;
  DistanceKind distance = DistanceKind::TorusRhoSimple;
  InitialKind initial = InitialKind::Antipodal;
  double offset = 1.0;
  // When set, gamma is re-derived as default_torus_gamma(beta, lambda, m, ell)
  // before each run, so sweeps over lambda/beta/m keep the standard tie.
  bool gamma_auto = false;
  std::vector<double> record;
  std::size_t replicas = 10000;
  std::uint64_t seed = 1;
};

// Worker count: ANDERSEN_THREADS if set (clamped to >= 1), else the hardware
// concurrency.  Estimates are reduced in replica-index order, so results are
// bit-identical for every worker count.
unsigned resolve_threads();

// Mean distance between the coupled copies at each record time.  Replicas
// that throw or produce non-finite distances are dropped; the whole run
// fails with SimulationError if more than 0.1% of them abort.
EstimateSeries estimate_rho_curve(const ExperimentSpec& spec, const Potential& U);

struct DecayFit {
  double rate = 0.0;       // least-squares slope of -log(mean) against t
  double r_squared = 0.0;
  std::size_t points = 0;
};

// Fit over the record times inside [t0, t1].  Throws FitDomainError when a
// mean in the window is not positive or fewer than two points remain.
DecayFit fit_decay_rate(const EstimateSeries& series, double t0, double t1);

enum class SweepAxis { Lambda, M, Gamma, Beta };

struct SweepRow {
  double value = 0.0;
  double mean_at_t = 0.0;
  double se_at_t = 0.0;
  double rate = 0.0;       // NaN when the fit window is empty or invalid
  double r_squared = 0.0;
};

using PotentialFactory = std::function<std::unique_ptr<Potential>(const SpaceSpec&)>;

// Re-runs the experiment for each axis value.  Sweeping M holds the
// per-particle rate lambda/m fixed (the potential is rebuilt for the new
// dimension); sweeping Lambda or Beta re-derives gamma when gamma_auto is
// set.  The same master seed is reused across values, which makes the rows
// positively correlated and comparisons between them less noisy.
std::vector<SweepRow> sweep(SweepAxis axis, const std::vector<double>& values,
                            const ExperimentSpec& base, const PotentialFactory& make_potential,
                            double at_time, double fit_t0, double fit_t1);

// e^{c t} E[distance] with per-time standard errors, plus the per-replica
// paired differences between consecutive record times, for testing that the
// exponentially rescaled distance does not drift upward.
struct SupermartingaleReport {
  EstimateSeries series;
  std::vector<double> step_mean;  // mean of e^{c t_{k+1}} d_{k+1} - e^{c t_k} d_k
  std::vector<double> step_se;

  // Every step increase is within n_se paired standard errors of zero.
  bool nonincreasing(double n_se = 2.0) const;
};

SupermartingaleReport supermartingale_check(const ExperimentSpec& spec, const Potential& U,
                                            double c);

}  // namespace andersen
