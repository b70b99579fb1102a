#include "andersen/flow.hpp"

#include <cmath>
#include <numbers>

#include "andersen/errors.hpp"

namespace andersen {

double hamiltonian(const PhasePoint& y, const Potential& U) {
  double k = 0.0;
  for (double vi : y.v) k += vi * vi;
  return 0.5 * k + U.energy(y.x);
}

double resolve_step(const Potential& U, const FlowConfig& cfg, double t) {
  if (cfg.step > 0.0) return cfg.step;
  double s = U.stiffness();
  if (s > 0.0) return 1e-3 * 2.0 * std::numbers::pi / std::sqrt(s);
  return t;  // force-free: a single drift step is already exact
}

namespace {

void exact_flow(PhasePoint& y, double t, const Potential& U, const SpaceSpec& space) {
  if (U.is_zero()) {
    for (std::size_t i = 0; i < y.x.size(); ++i) y.x[i] += t * y.v[i];
    if (space.kind == SpaceKind::Torus) wrap_position(y.x, space.ell);
    return;
  }
  const std::vector<double>* d = U.harmonic_diagonal();
  if (d == nullptr || space.kind == SpaceKind::Torus)
    throw ConfigError("exact flow needs U = 0 or a diagonal quadratic U on Euclidean space");
  for (std::size_t i = 0; i < y.x.size(); ++i) {
    double om = std::sqrt((*d)[i]);
    double c = std::cos(om * t), s = std::sin(om * t);
    double xi = y.x[i], vi = y.v[i];
    y.x[i] = xi * c + vi / om * s;
    y.v[i] = vi * c - xi * om * s;
  }
}

void verlet_step(PhasePoint& y, double h, const Potential& U, const SpaceSpec& space,
                 std::vector<double>& g) {
  for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] -= 0.5 * h * g[i];
  for (std::size_t i = 0; i < y.x.size(); ++i) y.x[i] += h * y.v[i];
  if (space.kind == SpaceKind::Torus) wrap_position(y.x, space.ell);
  U.gradient(y.x, g);
  for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] -= 0.5 * h * g[i];
}

void verlet_flow(PhasePoint& y, double t, const Potential& U, const SpaceSpec& space, double h) {
  auto nfull = static_cast<std::size_t>(std::floor(t / h));
  double rem = t - static_cast<double>(nfull) * h;
  std::vector<double> g;
  U.gradient(y.x, g);
  for (std::size_t k = 0; k < nfull; ++k) verlet_step(y, h, U, space, g);
  if (rem > 0.0) verlet_step(y, rem, U, space, g);
}

}  // namespace

void flow(PhasePoint& y, double t, const Potential& U, const SpaceSpec& space, const FlowConfig& cfg) {
  if (t <= 0.0) return;
  if (cfg.mode == FlowMode::Exact) {
    exact_flow(y, t, U, space);
    return;
  }
  verlet_flow(y, t, U, space, resolve_step(U, cfg, t));
}

void flow(CoupledPair& y, double t, const Potential& U, const SpaceSpec& space, const FlowConfig& cfg) {
  flow(y.first, t, U, space, cfg);
  flow(y.second, t, U, space, cfg);
}

namespace {

// Gradient of U at the second copy's position translate(x, -z).
void second_copy_gradient(const TorusCoupledState& y, const Potential& U, const SpaceSpec& space,
                          std::vector<double>& xbuf, std::vector<double>& g) {
  xbuf.resize(y.x.size());
  for (std::size_t i = 0; i < y.x.size(); ++i) xbuf[i] = wrap_position(y.x[i] - y.z[i], space.ell);
  U.gradient(xbuf, g);
}

void coupled_verlet_step(TorusCoupledState& y, double h, const Potential& U, const SpaceSpec& space,
                         std::vector<double>& g1, std::vector<double>& g2,
                         std::vector<double>& xbuf) {
  const std::size_t m = y.x.size();
  for (std::size_t i = 0; i < m; ++i) {
    y.v[i] -= 0.5 * h * g1[i];
    y.w[i] += 0.5 * h * (g2[i] - g1[i]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    y.x[i] = wrap_position(y.x[i] + h * y.v[i], space.ell);
    y.z[i] += h * y.w[i];
  }
  U.gradient(y.x, g1);
  second_copy_gradient(y, U, space, xbuf, g2);
  for (std::size_t i = 0; i < m; ++i) {
    y.v[i] -= 0.5 * h * g1[i];
    y.w[i] += 0.5 * h * (g2[i] - g1[i]);
  }
}

}  // namespace

void flow(TorusCoupledState& y, double t, const Potential& U, const SpaceSpec& space, const FlowConfig& cfg) {
  if (t <= 0.0) return;
  if (U.is_zero()) {
    // free streaming is exact in either mode
    for (std::size_t i = 0; i < y.x.size(); ++i) {
      y.x[i] = wrap_position(y.x[i] + t * y.v[i], space.ell);
      y.z[i] += t * y.w[i];
    }
    return;
  }
  if (cfg.mode == FlowMode::Exact)
    throw ConfigError("exact coupled flow on the torus needs U = 0");
  double h = resolve_step(U, cfg, t);
  auto nfull = static_cast<std::size_t>(std::floor(t / h));
  double rem = t - static_cast<double>(nfull) * h;
  std::vector<double> g1, g2, xbuf;
  U.gradient(y.x, g1);
  second_copy_gradient(y, U, space, xbuf, g2);
  for (std::size_t k = 0; k < nfull; ++k) coupled_verlet_step(y, h, U, space, g1, g2, xbuf);
  if (rem > 0.0) coupled_verlet_step(y, rem, U, space, g1, g2, xbuf);
}

CoupledPair project(const TorusCoupledState& y, const SpaceSpec& space) {
  CoupledPair p;
  p.first.x = y.x;
  p.first.v = y.v;
  p.second.x.resize(y.x.size());
  p.second.v.resize(y.v.size());
  for (std::size_t i = 0; i < y.x.size(); ++i) {
    p.second.x[i] = wrap_position(y.x[i] - y.z[i], space.ell);
    p.second.v[i] = y.v[i] - y.w[i];
  }
  return p;
}

}  // namespace andersen
