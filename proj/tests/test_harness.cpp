#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "andersen/errors.hpp"
#include "andersen/harness.hpp"

using namespace andersen;

namespace {

// Restores ANDERSEN_THREADS on scope exit so tests do not leak env state.
struct ThreadsGuard {
  std::string saved;
  bool had = false;
  ThreadsGuard() {
    if (const char* v = std::getenv("ANDERSEN_THREADS")) {
      saved = v;
      had = true;
    }
  }
  ~ThreadsGuard() {
    if (had)
      setenv("ANDERSEN_THREADS", saved.c_str(), 1);
    else
      unsetenv("ANDERSEN_THREADS");
  }
};

ExperimentSpec torus_free_spec() {
  ExperimentSpec spec;
  spec.space = {SpaceKind::Torus, 3, 1, 1.0};
  spec.coupling.kind = CouplingKind::Mirror;
  spec.coupling.lambda = 18.0;
  spec.coupling.beta = 1.0;
  spec.coupling.t_end = 3.0;
  spec.gamma_auto = true;
  spec.distance = DistanceKind::TorusRhoSimple;
  spec.initial = InitialKind::Antipodal;
  spec.record = make_grid(3.0, 0.25);
  spec.replicas = 400;
  spec.seed = 7;
  return spec;
}

}  // namespace

TEST_CASE("record grid construction") {
  auto g = make_grid(6.0, 0.25);
  REQUIRE(g.size() == 25);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 6.0);  // exact, not 5.9999...
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] > g[k - 1]);

  // when dt does not divide t_end the grid stops at the last full multiple
  auto h = make_grid(1.0, 0.3);
  REQUIRE(h.size() == 4);
  CHECK(h.back() == 3.0 * 0.3);

  // roundoff overshoot at the endpoint snaps back to exactly t_end
  auto s = make_grid(0.3, 0.1);
  REQUIRE(s.size() == 4);
  CHECK(s.back() == 0.3);

  auto z = make_grid(0.0, 0.5);
  REQUIRE(z.size() == 1);
  CHECK(z[0] == 0.0);

  CHECK_THROWS_AS(make_grid(1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(make_grid(-1.0, 0.5), ConfigError);
}

TEST_CASE("decay-rate fit on synthetic curves") {
  EstimateSeries s;
  for (double t = 0.0; t <= 10.0; t += 0.5) {
    s.t.push_back(t);
    s.mean.push_back(7.0 * std::exp(-0.5 * t));
    s.se.push_back(0.0);
    s.count.push_back(1);
  }
  DecayFit fit = fit_decay_rate(s, 2.0, 9.0);
  CHECK(std::abs(fit.rate - 0.5) < 1e-9);     // prefactor does not bias the slope
  CHECK(std::abs(fit.r_squared - 1.0) < 1e-9);
  CHECK(fit.points == 15);

  // window selection: points outside [t0, t1] are ignored
  s.mean[0] = -1.0;  // would poison the fit if it were included
  CHECK_NOTHROW(fit_decay_rate(s, 2.0, 9.0));

  // nonpositive mean inside the window
  EstimateSeries bad = s;
  bad.mean[10] = 0.0;  // t = 5
  CHECK_THROWS_AS(fit_decay_rate(bad, 2.0, 9.0), FitDomainError);
  // FitDomainError is a SimulationError, callers may catch either
  CHECK_THROWS_AS(fit_decay_rate(bad, 2.0, 9.0), SimulationError);

  // fewer than two usable points
  CHECK_THROWS_AS(fit_decay_rate(s, 4.9, 5.1), FitDomainError);
}

TEST_CASE("identical copies estimate an exactly zero curve") {
  ExperimentSpec spec;
  spec.space = {SpaceKind::Euclidean, 1, 2, 0.0};
  spec.coupling.kind = CouplingKind::Mirror;
  spec.coupling.gamma = 0.7;
  spec.coupling.lambda = 2.0;
  spec.coupling.t_end = 2.0;
  spec.distance = DistanceKind::WahRhoSquared;
  spec.initial = InitialKind::Offset;
  spec.offset = 0.0;  // zero displacement: the copies coincide
  spec.record = make_grid(2.0, 0.5);
  spec.replicas = 64;
  QuadraticPotential pot(std::vector<double>{1.0, 4.0});
  EstimateSeries series = estimate_rho_curve(spec, pot);
  REQUIRE(series.t.size() == 5);
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    CHECK(series.mean[k] == 0.0);
    CHECK(series.se[k] == 0.0);
    CHECK(series.count[k] == 64);
  }
}

TEST_CASE("standard error shrinks like one over root replicas") {
  ExperimentSpec spec = torus_free_spec();
  ZeroPotential pot(3);
  spec.replicas = 500;
  double se_small = estimate_rho_curve(spec, pot).se.back();
  spec.replicas = 2000;
  double se_big = estimate_rho_curve(spec, pot).se.back();
  REQUIRE(se_small > 0.0);
  // quadrupling the replicas should halve the error, within sampling noise
  CHECK(se_big / se_small > 0.35);
  CHECK(se_big / se_small < 0.65);
}

TEST_CASE("estimates do not depend on the worker count") {
  ThreadsGuard guard;
  ExperimentSpec spec = torus_free_spec();
  ZeroPotential pot(3);
  setenv("ANDERSEN_THREADS", "1", 1);
  CHECK(resolve_threads() == 1);
  EstimateSeries serial = estimate_rho_curve(spec, pot);
  setenv("ANDERSEN_THREADS", "5", 1);
  CHECK(resolve_threads() == 5);
  EstimateSeries threaded = estimate_rho_curve(spec, pot);
  CHECK(serial.mean == threaded.mean);  // bitwise, not approximate
  CHECK(serial.se == threaded.se);
  CHECK(serial.count == threaded.count);
}

TEST_CASE("replica failures abort the estimate") {
  // a potential whose gradient is finite but whose energy is NaN poisons
  // every distance through the initial velocity law; simpler: make the
  // gradient blow up so verlet produces non-finite states
  struct ExplodingPotential final : Potential {
    std::size_t dim() const override { return 1; }
    double energy(const std::vector<double>&) const override { return 0.0; }
    void gradient(const std::vector<double>&, std::vector<double>& g) const override {
      g.assign(1, std::numeric_limits<double>::quiet_NaN());
    }
    PotentialConstants constants() const override { return {}; }
    double stiffness() const override { return 1.0; }
  };

  ExperimentSpec spec;
  spec.space = {SpaceKind::Torus, 1, 1, 1.0};
  spec.coupling.kind = CouplingKind::Mirror;
  spec.coupling.gamma = 1.0;
  spec.coupling.lambda = 2.0;
  spec.coupling.t_end = 1.0;
  spec.coupling.flow = {FlowMode::Verlet, 0.1};
  spec.distance = DistanceKind::TorusRhoSimple;
  spec.record = {1.0};
  spec.replicas = 50;
  ExplodingPotential pot;
  CHECK_THROWS_AS(estimate_rho_curve(spec, pot), SimulationError);
}

TEST_CASE("sweep over the refreshment rate and the particle count") {
  ExperimentSpec base = torus_free_spec();
  base.replicas = 300;
  PotentialFactory factory = [](const SpaceSpec& s) -> std::unique_ptr<Potential> {
    return std::make_unique<ZeroPotential>(s.dim());
  };

  SUBCASE("lambda axis") {
    auto rows = sweep(SweepAxis::Lambda, {6.0, 18.0, 36.0}, base, factory, 2.0, 1.5, 2.7);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].value == 6.0);
    CHECK(rows[2].value == 36.0);
    for (const auto& r : rows) {
      CHECK(r.mean_at_t > 0.0);
      CHECK(r.se_at_t > 0.0);
      CHECK(std::isfinite(r.rate));
    }
    // the rediscovered base case matches a direct run
    EstimateSeries direct = estimate_rho_curve(base, *factory(base.space));
    std::size_t at = 0;
    while (direct.t[at] != 2.0) ++at;
    CHECK(rows[1].mean_at_t == direct.mean[at]);
  }

  SUBCASE("particle-count axis holds lambda per particle fixed") {
    auto rows = sweep(SweepAxis::M, {3.0, 6.0}, base, factory, 2.0, 1.5, 2.7);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mean_at_t > 0.0);
    CHECK(rows[1].mean_at_t > 0.0);
    // non-integer particle counts are rejected
    CHECK_THROWS_AS(sweep(SweepAxis::M, {2.5}, base, factory, 2.0, 1.5, 2.7), ConfigError);
  }

  SUBCASE("a failed fit is reported as NaN, not an exception") {
    // fit window beyond the record grid leaves no points
    auto rows = sweep(SweepAxis::Lambda, {18.0}, base, factory, 2.0, 2.8, 2.9);
    REQUIRE(rows.size() == 1);
    CHECK(std::isnan(rows[0].rate));
  }
}

TEST_CASE("supermartingale check") {
  SUBCASE("identical copies give an identically zero report") {
    ExperimentSpec spec;
    spec.space = {SpaceKind::Euclidean, 1, 1, 0.0};
    spec.coupling.kind = CouplingKind::Synchronous;
    spec.coupling.lambda = 1.0;
    spec.coupling.t_end = 2.0;
    spec.distance = DistanceKind::WahRhoSquared;
    spec.initial = InitialKind::Offset;
    spec.offset = 0.0;
    spec.record = make_grid(2.0, 0.5);
    spec.replicas = 32;
    QuadraticPotential pot(std::vector<double>{1.0});
    SupermartingaleReport rep = supermartingale_check(spec, pot, 0.3);
    CHECK(rep.nonincreasing());
    for (double m : rep.step_mean) CHECK(m == 0.0);
  }

  SUBCASE("true rate passes, a tenfold rate fails") {
    // synchronous coupling of a single harmonic particle: the metric
    // contracts at c = sqrt(5)/10 when lambda is tuned to 4 sqrt(5)/5
    double lam = 4.0 * std::sqrt(5.0) / 5.0;
    double c = std::sqrt(5.0) / 10.0;
    ExperimentSpec spec;
    spec.space = {SpaceKind::Euclidean, 1, 1, 0.0};
    spec.coupling.kind = CouplingKind::Synchronous;
    spec.coupling.lambda = lam;
    spec.coupling.beta = 1.0;
    spec.coupling.t_end = 4.0;
    spec.distance = DistanceKind::WahRhoSquared;
    spec.initial = InitialKind::Offset;
    spec.offset = 1.0;
    spec.record = make_grid(4.0, 0.5);
    spec.replicas = 4000;
    spec.seed = 19;
    QuadraticPotential pot(std::vector<double>{1.0});
    SupermartingaleReport ok = supermartingale_check(spec, pot, c);
    CHECK(ok.nonincreasing());
    SupermartingaleReport wrong = supermartingale_check(spec, pot, 10.0 * c);
    CHECK_FALSE(wrong.nonincreasing());
  }
}

TEST_CASE("initial conditions") {
  SUBCASE("antipodal torus start separates every component by ell/2") {
    ExperimentSpec spec = torus_free_spec();
    spec.replicas = 10;
    spec.record = {0.0};
    ZeroPotential pot(3);
    EstimateSeries at0 = estimate_rho_curve(spec, pot);
    // |zeta| = ell/2 and w = 0 in every component: distance is exactly 1/2
    CHECK(at0.mean[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(at0.se[0] < 1e-12);
  }

  SUBCASE("antipodal start needs a torus") {
    ExperimentSpec spec;
    spec.space = {SpaceKind::Euclidean, 1, 1, 0.0};
    spec.coupling.t_end = 1.0;
    spec.initial = InitialKind::Antipodal;
    spec.record = {1.0};
    spec.replicas = 4;
    QuadraticPotential pot(std::vector<double>{1.0});
    CHECK_THROWS_AS(estimate_rho_curve(spec, pot), ConfigError);
  }

  SUBCASE("stationary-vs-point start on the euclidean side") {
    ExperimentSpec spec;
    spec.space = {SpaceKind::Euclidean, 1, 2, 0.0};
    spec.coupling.kind = CouplingKind::Mirror;
    spec.coupling.gamma = 0.5;
    spec.coupling.lambda = 2.0;
    spec.coupling.t_end = 1.0;
    spec.distance = DistanceKind::WahRhoSquared;
    spec.initial = InitialKind::StationaryVsPoint;
    spec.record = {0.0};
    spec.replicas = 20000;
    QuadraticPotential pot(std::vector<double>{1.0, 4.0});
    EstimateSeries at0 = estimate_rho_curve(spec, pot);
    // E[rho^2] at time zero for z ~ N(0, C), w ~ N(0, I/beta):
    // E w^2/2 = 1, E z C^-1 z / 2 = 1, E z.w = 0,
    // E |z|^2 lambda^2/8 = (1 + 1/4) lambda^2 / 8
    double expect = 1.0 + 1.0 + (1.0 + 0.25) * 4.0 / 8.0;
    CHECK(std::abs(at0.mean[0] - expect) < 5.0 * at0.se[0]);
  }
}
