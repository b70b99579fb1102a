#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "andersen/flow.hpp"
#include "andersen/geometry.hpp"

namespace andersen {

// Quadratic contraction metric on Euclidean difference coordinates
// (z, w) = (x - x~, v - v~) for a quadratic-plus-convex potential with
// covariance C of the quadratic part:
//
//   rho(z, w)^2 = (1/2)|w|^2 + (1/2) z . C^-1 z
//              + (lambda / 4m) z . w + (lambda^2 / 8m^2) |z|^2
//              = (z, w) G (z, w)^T,
//
//   G = [ lambda^2/(8m^2) I + C^-1/2   lambda/(8m) I ]
//       [ lambda/(8m) I                I/2           ].
class WahMetric {
 public:
  WahMetric(double lambda, std::size_t m, std::vector<double> c_inv_diagonal);
  WahMetric(double lambda, std::size_t m, Eigen::MatrixXd c_inv);

  std::size_t dim() const;
  double rho_squared(const std::vector<double>& z, const std::vector<double>& w) const;
  double rho_squared(const CoupledPair& y) const;

  Eigen::MatrixXd gram() const;

  // Condition number of G.  With diagonal C^-1 the spectrum splits into
  // per-coordinate 2x2 blocks and is solved in closed form; the dense case
  // goes through a full symmetric eigensolve.
  double kappa() const;

 private:
  double lambda_;
  double m_;
  std::vector<double> diag_;
  Eigen::MatrixXd dense_;
};

struct WahRate {
  double c = 0.0;         // contraction rate (lambda/m) min(1/8, (8/5) m^2/(sigma_max^2 lambda^2))
  bool condition_ok = false;  // lambda/m >= 4 l_g sigma_max
  double kappa_g = 0.0;   // condition number of G for the single mode C = sigma_max^2
};
WahRate wah_rate(double lambda, double m, double sigma_max, double l_g);

// Derived quantities of the torus contraction metric and the hypotheses the
// contraction statement needs.  All lengths refer to a circle of
// circumference ell; lambda is the total refreshment rate of m particles.
struct TorusMetricParams {
  double R = 0.0;      // ell/2 + m / (sqrt(beta) lambda)
  double gamma = 0.0;  // 1 / (sqrt(beta) R)
  double a = 0.0;      // sqrt(beta) lambda / m
  double alpha = 0.0;  // sqrt(1 + beta L R^2)
  double c_A = 0.0;    // (1/90)(lambda/m) exp(-sqrt(beta)(lambda/m) ell/2)
  bool cond_lambda_ok = false;
  bool cond_j_ok = false;
};
TorusMetricParams torus_params(double beta, double lambda, std::size_t m, double ell, double L,
                               double J);

// f(r) = (1/a)(1 - exp(-a min(r, R))): concave, nondecreasing, constant
// beyond the cap R.  The left derivative is exposed for property checks.
double concave_cap(double r, double a, double R);
double concave_cap_left_derivative(double r, double a, double R);

// r_i = sqrt(zeta^2 + alpha^-2 q^2) with q = zeta + w/gamma.
double torus_r(double zeta, double w, const TorusMetricParams& p);

// rho = sum_i f(r_i) with zeta_i = minimal_difference(z_i, w_i).
double torus_rho(const TorusCoupledState& y, double ell, const TorusMetricParams& p);

// Plain average (1/m) sum_i sqrt(zeta_i^2 + w_i^2), the quantity reported
// by the coupling experiments.
double torus_rho_simple(const TorusCoupledState& y, double ell);

}  // namespace andersen
