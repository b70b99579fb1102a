#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

namespace andersen {

// Derivative bounds consumed by the contraction-rate formulas.
struct PotentialConstants {
  double sigma_max = 0.0;  // sqrt of the largest eigenvalue of C = (C^-1)^-1 (quadratic part)
  double l_g = 0.0;        // Lipschitz constant of the convex perturbation's gradient
  double L = 0.0;          // sup_i |d^2 U / dx_i^2|           (torus potentials)
  double J = 0.0;          // sup_{i != j} |d^2 U / dx_i dx_j| (torus potentials)
};

// Potential energy U on the configuration space.  Gradients are written into
// a caller-provided buffer because the integrators call them in a tight loop.
class Potential {
 public:
  virtual ~Potential() = default;

  virtual std::size_t dim() const = 0;
  virtual double energy(const std::vector<double>& x) const = 0;
  virtual void gradient(const std::vector<double>& x, std::vector<double>& g) const = 0;
  virtual PotentialConstants constants() const = 0;

  // Upper bound on ||Hessian U||; the integrator derives its default step
  // from the corresponding oscillation period.
  virtual double stiffness() const = 0;

  // Diagonal of C^-1 when U is exactly (1/2) x . C^-1 x with C^-1 diagonal,
  // else nullptr.  Closed-form flow is available only in that case.
  virtual const std::vector<double>* harmonic_diagonal() const { return nullptr; }
  virtual bool is_zero() const { return false; }

  // C^-1 of the quadratic part (with or without a convex perturbation), for
  // building the matching contraction metric.  Null when not applicable.
  virtual const std::vector<double>* quadratic_part_diagonal() const { return nullptr; }
  virtual const Eigen::MatrixXd* quadratic_part_dense() const { return nullptr; }

  std::vector<double> gradient(const std::vector<double>& x) const {
    std::vector<double> g(dim());
    gradient(x, g);
    return g;
  }
};

// U = 0 (free streaming).
class ZeroPotential final : public Potential {
 public:
  explicit ZeroPotential(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  double energy(const std::vector<double>&) const override { return 0.0; }
  void gradient(const std::vector<double>&, std::vector<double>& g) const override;
  PotentialConstants constants() const override { return {}; }
  double stiffness() const override { return 0.0; }
  bool is_zero() const override { return true; }

 private:
  std::size_t dim_;
};

// U(x) = (1/2) x . C^-1 x with C^-1 symmetric positive definite, given either
// by its diagonal or as a dense matrix.
class QuadraticPotential final : public Potential {
 public:
  explicit QuadraticPotential(std::vector<double> c_inv_diagonal);
  explicit QuadraticPotential(Eigen::MatrixXd c_inv);

  std::size_t dim() const override;
  double energy(const std::vector<double>& x) const override;
  void gradient(const std::vector<double>& x, std::vector<double>& g) const override;
  PotentialConstants constants() const override;
  double stiffness() const override { return eig_max_; }
  const std::vector<double>* harmonic_diagonal() const override {
    return diag_.empty() ? nullptr : &diag_;
  }
  const std::vector<double>* quadratic_part_diagonal() const override {
    return diag_.empty() ? nullptr : &diag_;
  }
  const Eigen::MatrixXd* quadratic_part_dense() const override {
    return diag_.empty() ? &dense_ : nullptr;
  }

 private:
  std::vector<double> diag_;  // diagonal case; empty when dense
  Eigen::MatrixXd dense_;
  double eig_min_ = 0.0;  // smallest eigenvalue of C^-1
  double eig_max_ = 0.0;  // largest eigenvalue of C^-1
};

// U(x) = (1/2) x . C^-1 x + G(x) with G convex and grad G Lipschitz.
//
// The built-in perturbation is a centered softplus of the norm,
//   G(x) = 4 l_g (log(1 + e^r) - log 2 - r/2),  r = |x|,
// which is smooth at the origin with G(0) = 0 and grad G(0) = 0.  Its
// Hessian eigenvalues are h''(r) and h'(r)/r, both maximal at r = 0 with
// value l_g, so grad G is l_g-Lipschitz and the bound is attained.
class QuadraticPlusConvexPotential final : public Potential {
 public:
  QuadraticPlusConvexPotential(std::vector<double> c_inv_diagonal, double l_g);
  QuadraticPlusConvexPotential(Eigen::MatrixXd c_inv, double l_g);

  std::size_t dim() const override { return quad_.dim(); }
  double energy(const std::vector<double>& x) const override;
  void gradient(const std::vector<double>& x, std::vector<double>& g) const override;
  PotentialConstants constants() const override;
  double stiffness() const override { return quad_.stiffness() + l_g_; }
  const std::vector<double>* quadratic_part_diagonal() const override {
    return quad_.quadratic_part_diagonal();
  }
  const Eigen::MatrixXd* quadratic_part_dense() const override {
    return quad_.quadratic_part_dense();
  }

 private:
  QuadraticPotential quad_;
  double l_g_;
};

// Periodic potential on m circle coordinates:
//   U(x) = sum_i A (1 - cos(2 pi x_i / ell))
//        + sum_{(i,j) in edges} Jbar (1 - cos(2 pi (x_i - x_j) / ell)).
class TorusCosinePotential final : public Potential {
 public:
  TorusCosinePotential(std::size_t m, double ell, double amp_local, double amp_pair,
                       std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t dim() const override { return m_; }
  double energy(const std::vector<double>& x) const override;
  void gradient(const std::vector<double>& x, std::vector<double>& g) const override;
  PotentialConstants constants() const override;
  double stiffness() const override;

 private:
  std::size_t m_;
  double ell_;
  double amp_local_;
  double amp_pair_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::size_t max_degree_ = 0;
};

}  // namespace andersen
