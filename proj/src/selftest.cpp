#include "andersen/selftest.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "andersen/coupling.hpp"
#include "andersen/harness.hpp"
#include "andersen/metrics.hpp"
#include "andersen/process.hpp"
#include "andersen/run_config.hpp"

namespace andersen {

namespace {

struct Suite {
  std::ostream& out;
  bool all_ok = true;

  void run(const char* name, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    out << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!ok && !detail.empty()) out << ": " << detail;
    out << "\n";
    all_ok = all_ok && ok;
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool torus_geometry(std::string& detail) {
  if (!near(wrap_position(1.3, 1.0), 0.3, 1e-15)) {
    detail = "wrap(1.3)";
    return false;
  }
  if (!near(wrap_position(-0.25, 1.0), 0.75, 1e-15)) {
    detail = "wrap(-0.25)";
    return false;
  }
  if (minimal_difference(0.5, -0.3, 1.0) != 0.5 || minimal_difference(0.5, 0.0, 1.0) != -0.5) {
    detail = "cut-locus tie rule";
    return false;
  }
  if (!near(minimal_difference(0.7, 0.0, 1.0), -0.3, 1e-15)) {
    detail = "zeta(0.7)";
    return false;
  }
  Rng rng(7);
  for (int k = 0; k < 2000; ++k) {
    double ell = 0.5 + 2.0 * rng.uniform();
    double z1 = 10.0 * (rng.uniform() - 0.5), z2 = 10.0 * (rng.uniform() - 0.5);
    double w = rng.normal();
    double za = minimal_difference(z1, w, ell), zb = minimal_difference(z2, w, ell);
    // |zeta| is 1-Lipschitz in z, and zeta is in range and congruent to z
    if (std::abs(std::abs(za) - std::abs(zb)) > std::abs(z1 - z2) + 1e-12) {
      detail = "contraction";
      return false;
    }
    if (std::abs(za) > 0.5 * ell + 1e-12) {
      detail = "range";
      return false;
    }
    double q = (z1 - za) / ell;
    if (std::abs(q - std::round(q)) > 1e-9) {
      detail = "congruence";
      return false;
    }
  }
  return true;
}

bool potential_gradients(std::string& detail) {
  Rng rng(11);
  std::vector<std::unique_ptr<Potential>> pots;
  pots.push_back(std::make_unique<QuadraticPotential>(std::vector<double>{1.0, 4.0, 9.0}));
  Eigen::MatrixXd c(2, 2);
  c << 2.0, 0.5, 0.5, 1.0;
  pots.push_back(std::make_unique<QuadraticPotential>(c));
  pots.push_back(
      std::make_unique<QuadraticPlusConvexPotential>(std::vector<double>{1.0, 2.0}, 0.7));
  pots.push_back(std::make_unique<TorusCosinePotential>(
      3, 1.0, 1.0, 0.5, std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}}));
  for (const auto& U : pots) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> x(U->dim());
      for (double& xi : x) xi = rng.normal();
      std::vector<double> g = U->gradient(x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = 1e-5;
        std::vector<double> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        double fd = (U->energy(xp) - U->energy(xm)) / (2.0 * h);
        if (std::abs(fd - g[i]) > 1e-6 * (1.0 + std::abs(fd))) {
          detail = "finite-difference mismatch";
          return false;
        }
      }
    }
  }
  return true;
}

bool flow_checks(std::string& detail) {
  SpaceSpec space{SpaceKind::Euclidean, 1, 2, 0.0};
  QuadraticPotential U(std::vector<double>{1.0, 4.0});
  FlowConfig exact{FlowMode::Exact, 0.0};
  Rng rng(13);
  for (int k = 0; k < 100; ++k) {
    PhasePoint y{{rng.normal(), rng.normal()}, {rng.normal(), rng.normal()}};
    double h0 = hamiltonian(y, U);
    flow(y, 0.37 + rng.uniform(), U, space, exact);
    if (std::abs(hamiltonian(y, U) - h0) > 1e-12 * (1.0 + std::abs(h0))) {
      detail = "exact flow energy drift";
      return false;
    }
  }
  // a split advance must equal one combined advance exactly in Verlet mode
  FlowConfig verlet{FlowMode::Verlet, 0.01};
  PhasePoint a{{0.3, -0.2}, {0.1, 0.4}};
  PhasePoint b = a;
  flow(a, 0.25, U, space, verlet);
  flow(a, 0.15, U, space, verlet);
  flow(b, 0.25, U, space, verlet);
  flow(b, 0.15, U, space, verlet);
  for (std::size_t i = 0; i < 2; ++i)
    if (a.x[i] != b.x[i] || a.v[i] != b.v[i]) {
      detail = "verlet not deterministic";
      return false;
    }
  // energy error drops by about 4x when the step is halved
  auto drift = [&](double h) {
    PhasePoint y{{1.0, 0.5}, {0.0, -0.3}};
    double h0 = hamiltonian(y, U);
    flow(y, 2.0, U, space, FlowConfig{FlowMode::Verlet, h});
    return std::abs(hamiltonian(y, U) - h0);
  };
  double ratio = drift(0.02) / drift(0.01);
  if (ratio < 3.0 || ratio > 5.0) {
    detail = "verlet order ratio " + std::to_string(ratio);
    return false;
  }
  return true;
}

bool refresh_clock(std::string& detail) {
  Rng rng(17);
  std::vector<double> times = jump_skeleton(2.0, 5000.0, rng);
  double prev = 0.0, sum = 0.0;
  for (double t : times) {
    if (t <= prev) {
      detail = "times not increasing";
      return false;
    }
    sum += t - prev;
    prev = t;
  }
  double mean_gap = sum / static_cast<double>(times.size());
  double se = 0.5 / std::sqrt(static_cast<double>(times.size()));
  if (std::abs(mean_gap - 0.5) > 5.0 * se) {
    detail = "mean gap " + std::to_string(mean_gap);
    return false;
  }
  return true;
}

bool maximal_coupling(std::string& detail) {
  bool acc = false;
  double v = coupled_velocity(1.0, 1.0, 0.1, 1.0, 1.0, &acc);
  if (!acc || v != 2.0) {
    detail = "accept branch";
    return false;
  }
  v = coupled_velocity(1.0, 1.0, 0.5, 1.0, 1.0, &acc);
  if (acc || v != -1.0) {
    detail = "reject branch";
    return false;
  }
  Rng rng(23);
  int rejects = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    coupled_velocity(rng.normal(), 1.0, rng.uniform(), 1.0, 1.0, &acc);
    if (!acc) ++rejects;
  }
  double p = rejection_probability_exact(1.0);
  double freq = static_cast<double>(rejects) / n;
  double se = std::sqrt(p * (1.0 - p) / n);
  if (std::abs(freq - p) > 4.0 * se) {
    detail = "rejection frequency " + std::to_string(freq);
    return false;
  }
  if (p > rejection_probability_bound(1.0)) {
    detail = "bound violated";
    return false;
  }
  return true;
}

bool metric_formulas(std::string& detail) {
  WahMetric g(2.0, 1, std::vector<double>{1.0});
  if (!near(g.rho_squared({1.0}, {0.0}), 1.0, 1e-14) ||
      !near(g.rho_squared({1.0}, {1.0}), 2.0, 1e-14)) {
    detail = "rho_squared values";
    return false;
  }
  if (!near(wah_rate(100.0, 1.0, 1.0, 0.0).c, 0.016, 1e-15)) {
    detail = "rate second branch";
    return false;
  }
  double lam = 4.0 * std::sqrt(5.0) / 5.0;
  if (!near(wah_rate(lam, 1.0, 1.0, 0.0).c, std::sqrt(5.0) / 10.0, 1e-14)) {
    detail = "rate optimum";
    return false;
  }
  TorusMetricParams p = torus_params(1.0, 60.0, 10, 1.0, 0.0, 0.0);
  if (!near(p.R, 2.0 / 3.0, 1e-15) || !near(p.gamma, 1.5, 1e-14) || !near(p.a, 6.0, 1e-14) ||
      !near(p.c_A, (6.0 / 90.0) * std::exp(-3.0), 1e-16) || p.cond_lambda_ok) {
    detail = "torus params";
    return false;
  }
  if (!near(concave_cap(1.0, 1.0, 2.0), 1.0 - std::exp(-1.0), 1e-15)) {
    detail = "cap value";
    return false;
  }
  Rng rng(29);
  for (int k = 0; k < 50; ++k) {
    std::size_t d = 1 + rng.uniform_index(4);
    std::vector<double> diag(d);
    for (double& di : diag) di = 0.1 + 5.0 * rng.uniform();
    WahMetric wm(0.1 + 5.0 * rng.uniform(), 1 + rng.uniform_index(5), diag);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(wm.gram(), Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0)) {
      detail = "gram not positive definite";
      return false;
    }
  }
  return true;
}

bool harness_checks(std::string& detail) {
  // coupled copies that start together stay together (distance identically 0)
  ExperimentSpec spec;
  spec.space = SpaceSpec{SpaceKind::Torus, 4, 1, 1.0};
  spec.coupling.kind = CouplingKind::Mirror;
  spec.coupling.lambda = 8.0;
  spec.coupling.beta = 1.0;
  spec.coupling.t_end = 2.0;
  spec.gamma_auto = true;
  spec.distance = DistanceKind::TorusRhoSimple;
  spec.initial = InitialKind::Offset;
  spec.offset = 0.0;
  spec.record = make_grid(2.0, 0.5);
  spec.replicas = 64;
  spec.seed = 5;
  ZeroPotential zero(4);
  EstimateSeries s = estimate_rho_curve(spec, zero);
  for (double mval : s.mean)
    if (mval != 0.0) {
      detail = "identical copies drifted apart";
      return false;
    }
  // worker count must not change the estimate bits
  spec.initial = InitialKind::Antipodal;
  const char* old = std::getenv("ANDERSEN_THREADS");
  std::string saved = old ? old : "";
  setenv("ANDERSEN_THREADS", "1", 1);
  EstimateSeries s1 = estimate_rho_curve(spec, zero);
  setenv("ANDERSEN_THREADS", "3", 1);
  EstimateSeries s3 = estimate_rho_curve(spec, zero);
  if (old)
    setenv("ANDERSEN_THREADS", saved.c_str(), 1);
  else
    unsetenv("ANDERSEN_THREADS");
  for (std::size_t k = 0; k < s1.mean.size(); ++k)
    if (s1.mean[k] != s3.mean[k] || s1.se[k] != s3.se[k]) {
      detail = "result depends on worker count";
      return false;
    }
  return true;
}

bool marginal_equality(std::string& detail) {
  // the first copy of a coupled run reproduces the single-copy run bit for
  // bit when both consume the same stream
  SpaceSpec space{SpaceKind::Euclidean, 1, 1, 0.0};
  QuadraticPotential U(std::vector<double>{1.0});
  std::vector<double> grid = make_grid(3.0, 0.5);

  AndersenConfig acfg;
  acfg.lambda = 1.5;
  acfg.beta = 1.0;
  acfg.t_end = 3.0;
  Rng r1 = Rng::stream(99, 0, 0);
  std::vector<PhasePoint> single =
      simulate_andersen(PhasePoint{{1.0}, {0.0}}, space, U, acfg, grid, r1);

  CouplingConfig ccfg;
  ccfg.kind = CouplingKind::Mirror;
  ccfg.gamma = 0.5;
  ccfg.lambda = 1.5;
  ccfg.beta = 1.0;
  ccfg.t_end = 3.0;
  Rng r2 = Rng::stream(99, 0, 0);
  CoupledPair y0{PhasePoint{{1.0}, {0.0}}, PhasePoint{{-0.5}, {0.2}}};
  std::vector<CoupledPair> coupled = simulate_coupling(y0, space, U, ccfg, grid, r2);

  for (std::size_t k = 0; k < grid.size(); ++k)
    if (single[k].x[0] != coupled[k].first.x[0] || single[k].v[0] != coupled[k].first.v[0]) {
      detail = "first copy diverged at t = " + std::to_string(grid[k]);
      return false;
    }
  return true;
}

bool config_roundtrip(std::string& detail) {
  RunConfig cfg;
  cfg.space_kind = "torus";
  cfg.m = 3;
  cfg.ell = 2.5;
  cfg.potential_variant = "zero";
  cfg.lambda = 18.0;
  cfg.t_end = 4.0;
  cfg.record_dt = 0.5;
  cfg.replicas = 10;
  cfg.seed = 77;
  ConfigMap echoed = RunConfig::from_map(parse_config_text(meta_json(cfg))).to_map();
  if (echoed != cfg.to_map()) {
    detail = "meta sidecar did not round-trip";
    return false;
  }
  return true;
}

}  // namespace

bool selftest(std::ostream& out) {
  Suite s{out};
  s.run("torus geometry", torus_geometry);
  s.run("potential gradients", potential_gradients);
  s.run("hamiltonian flow", flow_checks);
  s.run("refreshment clock", refresh_clock);
  s.run("maximal velocity coupling", maximal_coupling);
  s.run("metric formulas", metric_formulas);
  s.run("estimator harness", harness_checks);
  s.run("coupled marginal equality", marginal_equality);
  s.run("config round-trip", config_roundtrip);
  out << (s.all_ok ? "selftest: all suites passed\n" : "selftest: FAILURES\n");
  return s.all_ok;
}

}  // namespace andersen
