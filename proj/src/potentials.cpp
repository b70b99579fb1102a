#include "andersen/potentials.hpp"

#include <cmath>
#include <numbers>

#include "andersen/errors.hpp"

namespace andersen {

void ZeroPotential::gradient(const std::vector<double>&, std::vector<double>& g) const {
  g.assign(dim_, 0.0);
}

QuadraticPotential::QuadraticPotential(std::vector<double> c_inv_diagonal)
    : diag_(std::move(c_inv_diagonal)) {
  if (diag_.empty()) throw ConfigError("quadratic potential: empty diagonal");
  eig_min_ = diag_[0];
  eig_max_ = diag_[0];
  for (double d : diag_) {
    if (!(d > 0.0)) throw ConfigError("quadratic potential: diagonal of C^-1 must be positive");
    eig_min_ = std::min(eig_min_, d);
    eig_max_ = std::max(eig_max_, d);
  }
}

QuadraticPotential::QuadraticPotential(Eigen::MatrixXd c_inv) : dense_(std::move(c_inv)) {
  if (dense_.rows() == 0 || dense_.rows() != dense_.cols())
    throw ConfigError("quadratic potential: C^-1 must be square and nonempty");
  if (!dense_.isApprox(dense_.transpose(), 1e-12))
    throw ConfigError("quadratic potential: C^-1 must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_, Eigen::EigenvaluesOnly);
  eig_min_ = es.eigenvalues().minCoeff();
  eig_max_ = es.eigenvalues().maxCoeff();
  if (!(eig_min_ > 0.0)) throw ConfigError("quadratic potential: C^-1 must be positive definite");
}

std::size_t QuadraticPotential::dim() const {
  return diag_.empty() ? static_cast<std::size_t>(dense_.rows()) : diag_.size();
}

double QuadraticPotential::energy(const std::vector<double>& x) const {
  if (!diag_.empty()) {
    double e = 0.0;
    for (std::size_t i = 0; i < diag_.size(); ++i) e += diag_[i] * x[i] * x[i];
    return 0.5 * e;
  }
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), dense_.rows());
  return 0.5 * xv.dot(dense_ * xv);
}

void QuadraticPotential::gradient(const std::vector<double>& x, std::vector<double>& g) const {
  g.resize(x.size());
  if (!diag_.empty()) {
    for (std::size_t i = 0; i < diag_.size(); ++i) g[i] = diag_[i] * x[i];
    return;
  }
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), dense_.rows());
  Eigen::Map<Eigen::VectorXd> gv(g.data(), dense_.rows());
  gv = dense_ * xv;
}

PotentialConstants QuadraticPotential::constants() const {
  PotentialConstants c;
  // largest eigenvalue of C is 1 / (smallest eigenvalue of C^-1)
  c.sigma_max = 1.0 / std::sqrt(eig_min_);
  return c;
}

namespace {

// h(r) = 4 l_g (log(1 + e^r) - log2 - r/2), evaluated without overflow:
// log(1 + e^r) = r + log1p(e^-r) for r >= 0.
double softplus_centered(double r, double l_g) {
  return 4.0 * l_g * (0.5 * r + std::log1p(std::exp(-r)) - std::numbers::ln2);
}

// h'(r)/r = 2 l_g tanh(r/2) / r, extended by its limit l_g at r = 0.
double softplus_radial_coef(double r, double l_g) {
  if (r < 1e-8) return l_g;
  return 2.0 * l_g * std::tanh(0.5 * r) / r;
}

}  // namespace

QuadraticPlusConvexPotential::QuadraticPlusConvexPotential(std::vector<double> c_inv_diagonal, double l_g)
    : quad_(std::move(c_inv_diagonal)), l_g_(l_g) {
  if (l_g < 0.0) throw ConfigError("convex perturbation: l_g must be nonnegative");
}

QuadraticPlusConvexPotential::QuadraticPlusConvexPotential(Eigen::MatrixXd c_inv, double l_g)
    : quad_(std::move(c_inv)), l_g_(l_g) {
  if (l_g < 0.0) throw ConfigError("convex perturbation: l_g must be nonnegative");
}

double QuadraticPlusConvexPotential::energy(const std::vector<double>& x) const {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return quad_.energy(x) + softplus_centered(std::sqrt(r2), l_g_);
}

void QuadraticPlusConvexPotential::gradient(const std::vector<double>& x, std::vector<double>& g) const {
  quad_.gradient(x, g);
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  double coef = softplus_radial_coef(std::sqrt(r2), l_g_);
  for (std::size_t i = 0; i < x.size(); ++i) g[i] += coef * x[i];
}

PotentialConstants QuadraticPlusConvexPotential::constants() const {
  PotentialConstants c = quad_.constants();
  c.l_g = l_g_;
  return c;
}

TorusCosinePotential::TorusCosinePotential(std::size_t m, double ell, double amp_local, double amp_pair,
                                           std::vector<std::pair<std::size_t, std::size_t>> edges)
    : m_(m), ell_(ell), amp_local_(amp_local), amp_pair_(amp_pair), edges_(std::move(edges)) {
  if (m_ == 0) throw ConfigError("cosine potential: m must be positive");
  if (!(ell_ > 0.0)) throw ConfigError("cosine potential: ell must be positive");
  std::vector<std::size_t> degree(m_, 0);
  for (auto [i, j] : edges_) {
    if (i >= m_ || j >= m_ || i == j) throw ConfigError("cosine potential: bad edge");
    ++degree[i];
    ++degree[j];
  }
  for (std::size_t d : degree) max_degree_ = std::max(max_degree_, d);
}

double TorusCosinePotential::energy(const std::vector<double>& x) const {
  const double k = 2.0 * std::numbers::pi / ell_;
  double e = 0.0;
  for (std::size_t i = 0; i < m_; ++i) e += amp_local_ * (1.0 - std::cos(k * x[i]));
  for (auto [i, j] : edges_) e += amp_pair_ * (1.0 - std::cos(k * (x[i] - x[j])));
  return e;
}

void TorusCosinePotential::gradient(const std::vector<double>& x, std::vector<double>& g) const {
  const double k = 2.0 * std::numbers::pi / ell_;
  g.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) g[i] = amp_local_ * k * std::sin(k * x[i]);
  for (auto [i, j] : edges_) {
    double s = amp_pair_ * k * std::sin(k * (x[i] - x[j]));
    g[i] += s;
    g[j] -= s;
  }
}

PotentialConstants TorusCosinePotential::constants() const {
  const double k2 = std::pow(2.0 * std::numbers::pi / ell_, 2);
  PotentialConstants c;
  // second derivatives are k^2 Jbar cos(...) off-diagonal and
  // k^2 (A cos(...) + sum of incident pair terms) on the diagonal
  c.L = k2 * (std::abs(amp_local_) + std::abs(amp_pair_) * static_cast<double>(max_degree_));
  c.J = edges_.empty() ? 0.0 : k2 * std::abs(amp_pair_);
  return c;
}

double TorusCosinePotential::stiffness() const {
  PotentialConstants c = constants();
  return c.L + c.J * static_cast<double>(max_degree_);
}

}  // namespace andersen
