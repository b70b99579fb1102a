#include "andersen/coupling.hpp"

#include "andersen/process.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

#include "andersen/errors.hpp"
#include "event_loop.hpp"

namespace andersen {

void CouplingConfig::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("coupling: lambda must be positive");
  if (!(beta > 0.0)) throw ConfigError("coupling: beta must be positive");
  if (!(t_end >= 0.0)) throw ConfigError("coupling: t_end must be nonnegative");
  if (kind == CouplingKind::Mirror && !(gamma >= 0.0))
    throw ConfigError("coupling: mirror coupling needs gamma >= 0");
}

double default_torus_gamma(double beta, double lambda, std::size_t m, double ell) {
  double sqb = std::sqrt(beta);
  double big_r = 0.5 * ell + static_cast<double>(m) / (sqb * lambda);
  return 1.0 / (sqb * big_r);
}

std::vector<double> coupled_velocity(const std::vector<double>& a, const std::vector<double>& b,
                                     double u, double gamma, double beta, bool* accepted) {
  double b2 = 0.0, ab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    b2 += b[i] * b[i];
    ab += a[i] * b[i];
  }
  if (b2 == 0.0) {
    // |a + gamma*b| = |a|: the acceptance threshold is 0 and log u < 0 always
    if (accepted) *accepted = true;
    return a;
  }
  // |a + gamma*b|^2 - |a|^2 = 2 gamma (a.b) + gamma^2 |b|^2
  double log_threshold = -0.5 * beta * (2.0 * gamma * ab + gamma * gamma * b2);
  if (std::log(u) < log_threshold) {
    if (accepted) *accepted = true;
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + gamma * b[i];
    return out;
  }
  if (accepted) *accepted = false;
  assert(b2 > 0.0);
  double coef = 2.0 * ab / b2;  // 2 (e_b . a) / |b|
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - coef * b[i];
  return out;
}

double coupled_velocity(double a, double b, double u, double gamma, double beta, bool* accepted) {
  if (b == 0.0) {
    if (accepted) *accepted = true;
    return a;
  }
  double log_threshold = -0.5 * beta * (2.0 * gamma * a * b + gamma * gamma * b * b);
  if (std::log(u) < log_threshold) {
    if (accepted) *accepted = true;
    return a + gamma * b;
  }
  if (accepted) *accepted = false;
  return -a;  // reflection across the hyperplane normal to a scalar b flips the sign
}

double rejection_probability_exact(double s) {
  return std::erf(s / (2.0 * std::numbers::sqrt2));
}

double rejection_probability_bound(double s) {
  return s / std::sqrt(2.0 * std::numbers::pi);
}

void coupled_substitution(CoupledPair& y, std::size_t index, const std::vector<double>& a,
                          double u, const CouplingConfig& cfg, std::size_t n) {
  velocity_substitution(y.first.v, index, a, n);
  if (cfg.kind == CouplingKind::Synchronous) {
    velocity_substitution(y.second.v, index, a, n);
    return;
  }
  std::vector<double> b(n);
  for (std::size_t c = 0; c < n; ++c) b[c] = y.first.x[index * n + c] - y.second.x[index * n + c];
  std::vector<double> at = coupled_velocity(a, b, u, cfg.gamma, cfg.beta);
  velocity_substitution(y.second.v, index, at, n);
}

void coupled_substitution(TorusCoupledState& y, std::size_t index, double a, double u,
                          const CouplingConfig& cfg, double ell) {
  if (cfg.kind == CouplingKind::Synchronous) {
    y.v[index] = a;
    y.w[index] = 0.0;
    return;
  }
  double b = minimal_difference(y.z[index], y.w[index], ell);
  double at = coupled_velocity(a, b, u, cfg.gamma, cfg.beta);
  y.v[index] = a;
  y.w[index] = a - at;
}

namespace {

void check_record_grid(const std::vector<double>& record, double t_end) {
  for (std::size_t k = 0; k < record.size(); ++k) {
    if (!(record[k] >= 0.0) || record[k] > t_end)
      throw ConfigError("record grid must lie within [0, t_end]");
    if (k > 0 && !(record[k] > record[k - 1]))
      throw ConfigError("record grid must be strictly increasing");
  }
}

}  // namespace

void simulate_coupling(CoupledPair& y, const SpaceSpec& space, const Potential& U,
                       const CouplingConfig& cfg, const std::vector<double>& record, Rng& rng,
                       const PairRecordCallback& on_record) {
  cfg.validate();
  space.validate();
  check_record_grid(record, cfg.t_end);
  const double sigma_v = 1.0 / std::sqrt(cfg.beta);
  detail::run_jump_process(
      y, cfg.lambda, cfg.t_end, space.m, space.n, sigma_v, record, rng,
      [&](CoupledPair& s, double dt) { flow(s, dt, U, space, cfg.flow); },
      [&](CoupledPair& s, double, std::size_t index, const std::vector<double>& a, double u) {
        coupled_substitution(s, index, a, u, cfg, space.n);
      },
      [&](std::size_t k, double t, const CoupledPair& s) {
        if (on_record) on_record(k, t, s);
      });
}

void simulate_coupling(TorusCoupledState& y, const SpaceSpec& space, const Potential& U,
                       const CouplingConfig& cfg, const std::vector<double>& record, Rng& rng,
                       const TorusRecordCallback& on_record) {
  cfg.validate();
  space.validate();
  if (space.kind != SpaceKind::Torus)
    throw ConfigError("difference-coordinate coupling needs a torus space");
  check_record_grid(record, cfg.t_end);
  const double sigma_v = 1.0 / std::sqrt(cfg.beta);
  detail::run_jump_process(
      y, cfg.lambda, cfg.t_end, space.m, space.n, sigma_v, record, rng,
      [&](TorusCoupledState& s, double dt) { flow(s, dt, U, space, cfg.flow); },
      [&](TorusCoupledState& s, double, std::size_t index, const std::vector<double>& a, double u) {
        coupled_substitution(s, index, a[0], u, cfg, space.ell);
      },
      [&](std::size_t k, double t, const TorusCoupledState& s) {
        if (on_record) on_record(k, t, s);
      });
}

std::vector<CoupledPair> simulate_coupling(CoupledPair y0, const SpaceSpec& space,
                                           const Potential& U, const CouplingConfig& cfg,
                                           const std::vector<double>& record, Rng& rng) {
  std::vector<CoupledPair> out(record.size());
  simulate_coupling(
      y0, space, U, cfg, record, rng,
      [&](std::size_t k, double, const CoupledPair& s) { out[k] = s; });
  return out;
}

std::vector<TorusCoupledState> simulate_coupling(TorusCoupledState y0, const SpaceSpec& space,
                                                 const Potential& U, const CouplingConfig& cfg,
                                                 const std::vector<double>& record, Rng& rng) {
  std::vector<TorusCoupledState> out(record.size());
  simulate_coupling(
      y0, space, U, cfg, record, rng,
      [&](std::size_t k, double, const TorusCoupledState& s) { out[k] = s; });
  return out;
}

}  // namespace andersen
