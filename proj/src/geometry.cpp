#include "andersen/geometry.hpp"

#include <cmath>

#include "andersen/errors.hpp"

namespace andersen {

void SpaceSpec::validate() const {
  if (m == 0 || n == 0) throw ConfigError("space: m and n must be positive");
  if (kind == SpaceKind::Torus) {
    if (n != 1) throw ConfigError("space: torus particles are scalar coordinates (n must be 1)");
    if (!(ell > 0.0)) throw ConfigError("space: torus needs ell > 0");
  }
}

double wrap_position(double x, double ell) {
  double r = x - ell * std::floor(x / ell);
  // floor arithmetic can land exactly on the seam from either side
  if (r >= ell) r -= ell;
  if (r < 0.0) r += ell;
  return r;
}

void wrap_position(std::vector<double>& x, double ell) {
  for (double& xi : x) xi = wrap_position(xi, ell);
}

std::vector<double> translate(const std::vector<double>& x, const std::vector<double>& s, double ell) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = wrap_position(x[i] + s[i], ell);
  return out;
}

double minimal_difference(double z, double w, double ell) {
  // z sits on the cut locus iff (z + ell/2)/ell is an integer
  double u = z / ell + 0.5;
  double r = std::round(u);
  if (std::abs(u - r) <= 1e-12) {
    return (w < 0.0) ? 0.5 * ell : -0.5 * ell;
  }
  return z - std::floor(u) * ell;
}

std::vector<double> minimal_difference(const std::vector<double>& z, const std::vector<double>& w, double ell) {
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = minimal_difference(z[i], w[i], ell);
  return out;
}

}  // namespace andersen
