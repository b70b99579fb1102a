#pragma once

#include <cstddef>
#include <vector>

namespace andersen {

enum class SpaceKind { Euclidean, Torus };

// Configuration space for m particles with n coordinates each: either
// R^(m*n), or m scalar coordinates on the circle of circumference ell
// (torus particles are scalars, so n must be 1 there).
struct SpaceSpec {
  SpaceKind kind = SpaceKind::Euclidean;
  std::size_t m = 1;  // particles
  std::size_t n = 1;  // coordinates per particle
  double ell = 0.0;   // circle circumference (torus only)

  std::size_t dim() const { return m * n; }

  // Throws ConfigError on nonsense (m*n == 0, torus with n != 1 or ell <= 0).
  void validate() const;
};

// Position/velocity pair; both vectors have length space.dim().
struct PhasePoint {
  std::vector<double> x;
  std::vector<double> v;
};

// Canonical representative of x mod ell in [0, ell).
double wrap_position(double x, double ell);
void wrap_position(std::vector<double>& x, double ell);

// Torus translation by s: wrap(x + s), componentwise.
std::vector<double> translate(const std::vector<double>& x, const std::vector<double>& s, double ell);

// Signed minimal representative of z mod ell in [-ell/2, ell/2].
//
// On the cut locus (z within 1e-12*ell of ell/2 + k*ell) the representative
// is not unique; the sign of the relative velocity w breaks the tie so that
// t -> minimal_difference(z + t*w, w, ell) is right-continuous:
// w < 0 picks +ell/2, w >= 0 picks -ell/2.
double minimal_difference(double z, double w, double ell);

// Componentwise minimal differences for a whole difference state.
std::vector<double> minimal_difference(const std::vector<double>& z, const std::vector<double>& w, double ell);

}  // namespace andersen
