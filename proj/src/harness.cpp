#include "andersen/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "andersen/errors.hpp"

namespace andersen {

std::vector<double> make_grid(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw ConfigError("grid: need dt > 0 and t_end >= 0");
  auto steps = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12) + 1e-12));
  std::vector<double> g;
  g.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    double t = static_cast<double>(k) * dt;
    g.push_back(t < t_end ? t : t_end);
  }
  if (g.size() >= 2 && g.back() == g[g.size() - 2]) g.pop_back();
  return g;
}

unsigned resolve_threads() {
  if (const char* env = std::getenv("ANDERSEN_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
    return 1;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace {

constexpr std::uint64_t kEventTag = 0;
constexpr std::uint64_t kInitTag = 1;

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> v;
  std::vector<std::uint8_t> ok;

  double at(std::size_t r, std::size_t k) const { return v[r * cols + k]; }
};

CouplingConfig resolved_coupling(const ExperimentSpec& spec) {
  CouplingConfig cfg = spec.coupling;
  if (spec.gamma_auto) {
    if (spec.space.kind != SpaceKind::Torus)
      throw ConfigError("gamma_auto applies to torus experiments only");
    cfg.gamma = default_torus_gamma(cfg.beta, cfg.lambda, spec.space.m, spec.space.ell);
  }
  cfg.validate();
  return cfg;
}

TorusCoupledState initial_torus(const ExperimentSpec& spec, const Potential& U,
                                const CouplingConfig& cfg, Rng& rng) {
  const std::size_t m = spec.space.m;
  const double ell = spec.space.ell;
  TorusCoupledState y;
  y.x.resize(m);
  y.v.resize(m);
  // positions first, then velocities, so the draw layout is fixed
  for (std::size_t i = 0; i < m; ++i) y.x[i] = ell * rng.uniform();
  const double sigma_v = 1.0 / std::sqrt(cfg.beta);
  for (std::size_t i = 0; i < m; ++i) y.v[i] = sigma_v * rng.normal();
  switch (spec.initial) {
    case InitialKind::Antipodal:
      y.z.assign(m, 0.5 * ell);
      y.w.assign(m, 0.0);
      break;
    case InitialKind::Offset:
      y.z.assign(m, spec.offset);
      y.w.assign(m, 0.0);
      break;
    case InitialKind::StationaryVsPoint:
      // uniform positions are stationary only without a potential
      if (!U.is_zero())
        throw ConfigError("stationary_vs_point on the torus needs the zero potential");
      y.z = y.x;
      y.w = y.v;
      break;
  }
  return y;
}

CoupledPair initial_pair(const ExperimentSpec& spec, const Potential& U,
                         const CouplingConfig& cfg, Rng& rng) {
  const std::size_t d = spec.space.dim();
  CoupledPair y;
  y.second.x.assign(d, 0.0);
  y.second.v.assign(d, 0.0);
  switch (spec.initial) {
    case InitialKind::Antipodal:
      throw ConfigError("antipodal initial condition needs a torus");
    case InitialKind::Offset:
      y.first.x.assign(d, spec.offset);
      y.first.v.assign(d, 0.0);
      break;
    case InitialKind::StationaryVsPoint: {
      const std::vector<double>* c_inv = U.quadratic_part_diagonal();
      if (c_inv == nullptr)
        throw ConfigError("stationary_vs_point needs a diagonal quadratic potential");
      y.first.x.resize(d);
      y.first.v.resize(d);
      for (std::size_t i = 0; i < d; ++i)
        y.first.x[i] = rng.normal() / std::sqrt(cfg.beta * (*c_inv)[i]);
      for (std::size_t i = 0; i < d; ++i) y.first.v[i] = rng.normal() / std::sqrt(cfg.beta);
      break;
    }
  }
  return y;
}

Matrix run_matrix(const ExperimentSpec& spec, const Potential& U) {
  spec.space.validate();
  if (spec.replicas == 0) throw ConfigError("experiment: needs at least one replica");
  if (spec.record.empty()) throw ConfigError("experiment: empty record grid");
  if (U.dim() != spec.space.dim()) throw ConfigError("experiment: potential dimension mismatch");
  const CouplingConfig cfg = resolved_coupling(spec);
  const bool torus = spec.space.kind == SpaceKind::Torus;

  // distance evaluators; the metric objects are built once up front
  std::function<double(const TorusCoupledState&)> torus_dist;
  std::function<double(const CoupledPair&)> pair_dist;
  switch (spec.distance) {
    case DistanceKind::WahRhoSquared: {
      if (torus) throw ConfigError("rho_squared_wah is a Euclidean distance");
      const std::vector<double>* diag = U.quadratic_part_diagonal();
      const Eigen::MatrixXd* dense = U.quadratic_part_dense();
      if (diag == nullptr && dense == nullptr)
        throw ConfigError("rho_squared_wah needs a quadratic potential");
      auto metric = diag != nullptr
                        ? std::make_shared<WahMetric>(cfg.lambda, spec.space.m, *diag)
                        : std::make_shared<WahMetric>(cfg.lambda, spec.space.m, *dense);
      pair_dist = [metric](const CoupledPair& y) { return metric->rho_squared(y); };
      break;
    }
    case DistanceKind::TorusRho: {
      if (!torus) throw ConfigError("rho_theorem needs a torus");
      PotentialConstants pc = U.constants();
      TorusMetricParams p =
          torus_params(cfg.beta, cfg.lambda, spec.space.m, spec.space.ell, pc.L, pc.J);
      double ell = spec.space.ell;
      torus_dist = [p, ell](const TorusCoupledState& y) { return torus_rho(y, ell, p); };
      break;
    }
    case DistanceKind::TorusRhoSimple: {
      if (!torus) throw ConfigError("rho_simple needs a torus");
      double ell = spec.space.ell;
      torus_dist = [ell](const TorusCoupledState& y) { return torus_rho_simple(y, ell); };
      break;
    }
  }

  Matrix mat;
  mat.rows = spec.replicas;
  mat.cols = spec.record.size();
  mat.v.assign(mat.rows * mat.cols, std::numeric_limits<double>::quiet_NaN());
  mat.ok.assign(mat.rows, 1);

  auto run_replica = [&](std::size_t r) {
    Rng init_rng = Rng::stream(spec.seed, r, kInitTag);
    Rng event_rng = Rng::stream(spec.seed, r, kEventTag);
    double* row = mat.v.data() + r * mat.cols;
    auto store = [&](std::size_t k, double value) {
      if (!std::isfinite(value)) throw SimulationError("non-finite distance");
      row[k] = value;
    };
    if (torus) {
      TorusCoupledState y = initial_torus(spec, U, cfg, init_rng);
      simulate_coupling(y, spec.space, U, cfg, spec.record, event_rng,
                        [&](std::size_t k, double, const TorusCoupledState& s) {
                          store(k, torus_dist(s));
                        });
    } else {
      CoupledPair y = initial_pair(spec, U, cfg, init_rng);
      simulate_coupling(y, spec.space, U, cfg, spec.record, event_rng,
                        [&](std::size_t k, double, const CoupledPair& s) {
                          store(k, pair_dist(s));
                        });
    }
  };

  unsigned workers = resolve_threads();
  if (static_cast<std::size_t>(workers) > spec.replicas)
    workers = static_cast<unsigned>(spec.replicas);
  if (workers <= 1) {
    for (std::size_t r = 0; r < mat.rows; ++r) {
      try {
        run_replica(r);
      } catch (const ConfigError&) {
        throw;  // setup mistakes are not per-replica noise
      } catch (const std::exception&) {
        mat.ok[r] = 0;
      }
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<bool> config_failure{false};
    for (unsigned wkr = 0; wkr < workers; ++wkr) {
      pool.emplace_back([&, wkr] {
        for (std::size_t r = wkr; r < mat.rows; r += workers) {
          try {
            run_replica(r);
          } catch (const ConfigError&) {
            config_failure = true;
            return;
          } catch (const std::exception&) {
            mat.ok[r] = 0;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (config_failure) throw ConfigError("experiment setup failed inside a replica");
  }

  std::size_t aborted = 0;
  for (auto flag : mat.ok)
    if (!flag) ++aborted;
  if (static_cast<double>(aborted) > 1e-3 * static_cast<double>(mat.rows))
    throw SimulationError("too many aborted replicas: " + std::to_string(aborted) + " of " +
                          std::to_string(mat.rows));
  return mat;
}

// Welford reduction over replicas in index order: deterministic for any
// worker count.
void reduce_column(const Matrix& mat, std::size_t k, double factor, double& mean_out,
                   double& se_out, std::size_t& n_out) {
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < mat.rows; ++r) {
    if (!mat.ok[r]) continue;
    ++n;
    double x = factor * mat.at(r, k);
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  mean_out = n > 0 ? mean : std::numeric_limits<double>::quiet_NaN();
  double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  se_out = n > 0 ? std::sqrt(var / static_cast<double>(n)) : 0.0;
  n_out = n;
}

EstimateSeries reduce_matrix(const Matrix& mat, const std::vector<double>& grid,
                             const std::vector<double>& factors) {
  EstimateSeries s;
  s.t = grid;
  s.mean.resize(mat.cols);
  s.se.resize(mat.cols);
  s.count.resize(mat.cols);
  for (std::size_t k = 0; k < mat.cols; ++k)
    reduce_column(mat, k, factors.empty() ? 1.0 : factors[k], s.mean[k], s.se[k], s.count[k]);
  return s;
}

}  // namespace

EstimateSeries estimate_rho_curve(const ExperimentSpec& spec, const Potential& U) {
  Matrix mat = run_matrix(spec, U);
  return reduce_matrix(mat, spec.record, {});
}

DecayFit fit_decay_rate(const EstimateSeries& series, double t0, double t1) {
  const double tol = 1e-9 * std::max({1.0, std::abs(t0), std::abs(t1)});
  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    if (series.t[k] < t0 - tol || series.t[k] > t1 + tol) continue;
    if (!(series.mean[k] > 0.0))
      throw FitDomainError("fit window contains a nonpositive mean at t = " +
                           std::to_string(series.t[k]));
    ts.push_back(series.t[k]);
    ys.push_back(-std::log(series.mean[k]));
  }
  if (ts.size() < 2) throw FitDomainError("fit window must contain at least two record times");
  double tbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tbar += ts[i];
    ybar += ys[i];
  }
  tbar /= static_cast<double>(ts.size());
  ybar /= static_cast<double>(ts.size());
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tbar) * (ts[i] - tbar);
    sty += (ts[i] - tbar) * (ys[i] - ybar);
    syy += (ys[i] - ybar) * (ys[i] - ybar);
  }
  DecayFit fit;
  fit.points = ts.size();
  fit.rate = sty / stt;
  double ss_res = syy - sty * sty / stt;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::vector<SweepRow> sweep(SweepAxis axis, const std::vector<double>& values,
                            const ExperimentSpec& base, const PotentialFactory& make_potential,
                            double at_time, double fit_t0, double fit_t1) {
  if (values.empty()) throw ConfigError("sweep: empty value list");
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double value : values) {
    ExperimentSpec spec = base;
    switch (axis) {
      case SweepAxis::Lambda:
        spec.coupling.lambda = value;
        break;
      case SweepAxis::M: {
        auto m = static_cast<std::size_t>(std::llround(value));
        if (m == 0 || std::abs(value - static_cast<double>(m)) > 1e-9)
          throw ConfigError("sweep: m values must be positive integers");
        // hold the per-particle rate fixed while the particle count moves
        spec.coupling.lambda = base.coupling.lambda / static_cast<double>(base.space.m) *
                               static_cast<double>(m);
        spec.space.m = m;
        break;
      }
      case SweepAxis::Gamma:
        spec.coupling.gamma = value;
        spec.gamma_auto = false;
        break;
      case SweepAxis::Beta:
        spec.coupling.beta = value;
        break;
    }
    std::unique_ptr<Potential> U = make_potential(spec.space);
    EstimateSeries series = estimate_rho_curve(spec, *U);

    SweepRow row;
    row.value = value;
    std::size_t at = 0;
    for (std::size_t k = 1; k < series.t.size(); ++k)
      if (std::abs(series.t[k] - at_time) < std::abs(series.t[at] - at_time)) at = k;
    row.mean_at_t = series.mean[at];
    row.se_at_t = series.se[at];
    try {
      DecayFit fit = fit_decay_rate(series, fit_t0, fit_t1);
      row.rate = fit.rate;
      row.r_squared = fit.r_squared;
    } catch (const FitDomainError&) {
      row.rate = std::numeric_limits<double>::quiet_NaN();
      row.r_squared = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

bool SupermartingaleReport::nonincreasing(double n_se) const {
  for (std::size_t k = 0; k < step_mean.size(); ++k)
    if (step_mean[k] > n_se * step_se[k]) return false;
  return true;
}

SupermartingaleReport supermartingale_check(const ExperimentSpec& spec, const Potential& U,
                                            double c) {
  Matrix mat = run_matrix(spec, U);
  std::vector<double> factors(spec.record.size());
  for (std::size_t k = 0; k < factors.size(); ++k) factors[k] = std::exp(c * spec.record[k]);

  SupermartingaleReport rep;
  rep.series = reduce_matrix(mat, spec.record, factors);
  if (mat.cols < 2) return rep;
  rep.step_mean.resize(mat.cols - 1);
  rep.step_se.resize(mat.cols - 1);
  for (std::size_t k = 0; k + 1 < mat.cols; ++k) {
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < mat.rows; ++r) {
      if (!mat.ok[r]) continue;
      ++n;
      double d = factors[k + 1] * mat.at(r, k + 1) - factors[k] * mat.at(r, k);
      double delta = d - mean;
      mean += delta / static_cast<double>(n);
      m2 += delta * (d - mean);
    }
    rep.step_mean[k] = mean;
    double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    rep.step_se[k] = n > 0 ? std::sqrt(var / static_cast<double>(n)) : 0.0;
  }
  return rep;
}

}  // namespace andersen
