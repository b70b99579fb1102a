#include "andersen/metrics.hpp"

#include <cmath>

#include "andersen/errors.hpp"

namespace andersen {

WahMetric::WahMetric(double lambda, std::size_t m, std::vector<double> c_inv_diagonal)
    : lambda_(lambda), m_(static_cast<double>(m)), diag_(std::move(c_inv_diagonal)) {
  if (!(lambda > 0.0) || m == 0) throw ConfigError("metric: lambda and m must be positive");
  for (double d : diag_)
    if (!(d > 0.0)) throw ConfigError("metric: C^-1 diagonal must be positive");
  if (diag_.empty()) throw ConfigError("metric: empty C^-1");
}

WahMetric::WahMetric(double lambda, std::size_t m, Eigen::MatrixXd c_inv)
    : lambda_(lambda), m_(static_cast<double>(m)), dense_(std::move(c_inv)) {
  if (!(lambda > 0.0) || m == 0) throw ConfigError("metric: lambda and m must be positive");
  if (dense_.rows() == 0 || dense_.rows() != dense_.cols())
    throw ConfigError("metric: C^-1 must be square and nonempty");
}

std::size_t WahMetric::dim() const {
  return diag_.empty() ? static_cast<std::size_t>(dense_.rows()) : diag_.size();
}

double WahMetric::rho_squared(const std::vector<double>& z, const std::vector<double>& w) const {
  const std::size_t d = dim();
  double zz = 0.0, zw = 0.0, ww = 0.0, zcz = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    zz += z[i] * z[i];
    zw += z[i] * w[i];
    ww += w[i] * w[i];
  }
  if (!diag_.empty()) {
    for (std::size_t i = 0; i < d; ++i) zcz += diag_[i] * z[i] * z[i];
  } else {
    Eigen::Map<const Eigen::VectorXd> zv(z.data(), dense_.rows());
    zcz = zv.dot(dense_ * zv);
  }
  double lm = lambda_ / m_;
  return 0.5 * ww + 0.5 * zcz + 0.25 * lm * zw + 0.125 * lm * lm * zz;
}

double WahMetric::rho_squared(const CoupledPair& y) const {
  const std::size_t d = dim();
  std::vector<double> z(d), w(d);
  for (std::size_t i = 0; i < d; ++i) {
    z[i] = y.first.x[i] - y.second.x[i];
    w[i] = y.first.v[i] - y.second.v[i];
  }
  return rho_squared(z, w);
}

Eigen::MatrixXd WahMetric::gram() const {
  const auto d = static_cast<Eigen::Index>(dim());
  double lm = lambda_ / m_;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    g(i, i) = 0.125 * lm * lm;
    g(i, d + i) = 0.125 * lm;
    g(d + i, i) = 0.125 * lm;
    g(d + i, d + i) = 0.5;
  }
  if (!diag_.empty()) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, i) += 0.5 * diag_[static_cast<std::size_t>(i)];
  } else {
    g.topLeftCorner(d, d) += 0.5 * dense_;
  }
  return g;
}

double WahMetric::kappa() const {
  double lm = lambda_ / m_;
  if (!diag_.empty()) {
    // each coordinate contributes the block [[lm^2/8 + d/2, lm/8], [lm/8, 1/2]]
    double lo = 0.0, hi = 0.0;
    bool set = false;
    for (double d : diag_) {
      double p = 0.125 * lm * lm + 0.5 * d;
      double q = 0.125 * lm;
      double mean = 0.5 * (p + 0.5);
      double disc = std::sqrt(0.25 * (p - 0.5) * (p - 0.5) + q * q);
      double emin = mean - disc, emax = mean + disc;
      if (!set || emin < lo) lo = emin;
      if (!set || emax > hi) hi = emax;
      set = true;
    }
    return hi / lo;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

WahRate wah_rate(double lambda, double m, double sigma_max, double l_g) {
  if (!(lambda > 0.0) || !(m > 0.0) || !(sigma_max > 0.0) || l_g < 0.0)
    throw ConfigError("wah_rate: need lambda, m, sigma_max > 0 and l_g >= 0");
  WahRate out;
  double lm = lambda / m;
  out.c = lm * std::min(0.125, 1.6 * m * m / (sigma_max * sigma_max * lambda * lambda));
  out.condition_ok = lm >= 4.0 * l_g * sigma_max;
  // kappa of the worst single mode, C^-1 = sigma_max^-2
  double p = 0.125 * lm * lm + 0.5 / (sigma_max * sigma_max);
  double q = 0.125 * lm;
  double mean = 0.5 * (p + 0.5);
  double disc = std::sqrt(0.25 * (p - 0.5) * (p - 0.5) + q * q);
  out.kappa_g = (mean + disc) / (mean - disc);
  return out;
}

TorusMetricParams torus_params(double beta, double lambda, std::size_t m, double ell, double L,
                               double J) {
  if (!(beta > 0.0) || !(lambda > 0.0) || m == 0 || !(ell > 0.0) || L < 0.0 || J < 0.0)
    throw ConfigError("torus_params: need beta, lambda, m, ell > 0 and L, J >= 0");
  TorusMetricParams p;
  double md = static_cast<double>(m);
  double sqb = std::sqrt(beta);
  double half = 0.5 * ell;
  p.R = half + md / (sqb * lambda);
  p.gamma = 1.0 / (sqb * p.R);
  p.a = sqb * lambda / md;
  p.alpha = std::sqrt(1.0 + beta * L * p.R * p.R);
  p.c_A = (lambda / md) / 90.0 * std::exp(-sqb * (lambda / md) * half);
  p.cond_lambda_ok = sqb * (lambda / md) * half >= 25.0 / 6.0 + 11.0 * beta * L * half * half;
  if (m == 1) {
    p.cond_j_ok = true;  // no interaction terms to control
  } else {
    double bound = std::exp(-sqb * (lambda / md) * half) *
                   std::max(std::sqrt(beta * L * ell * ell), 1.0) /
                   (75.0 * (md - 1.0) * beta * ell * ell);
    p.cond_j_ok = J <= bound;
  }
  return p;
}

double concave_cap(double r, double a, double R) {
  return -std::expm1(-a * std::min(r, R)) / a;
}

double concave_cap_left_derivative(double r, double a, double R) {
  if (r > R) return 0.0;
  return std::exp(-a * r);  // at r = R this is the left limit; beyond, f is flat
}

double torus_r(double zeta, double w, const TorusMetricParams& p) {
  double q = zeta + w / p.gamma;
  return std::sqrt(zeta * zeta + q * q / (p.alpha * p.alpha));
}

double torus_rho(const TorusCoupledState& y, double ell, const TorusMetricParams& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.z.size(); ++i) {
    double zeta = minimal_difference(y.z[i], y.w[i], ell);
    s += concave_cap(torus_r(zeta, y.w[i], p), p.a, p.R);
  }
  return s;
}

double torus_rho_simple(const TorusCoupledState& y, double ell) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.z.size(); ++i) {
    double zeta = minimal_difference(y.z[i], y.w[i], ell);
    s += std::sqrt(zeta * zeta + y.w[i] * y.w[i]);
  }
  return s / static_cast<double>(y.z.size());
}

}  // namespace andersen
