#pragma once

#include <functional>

#include "andersen/flow.hpp"
#include "andersen/geometry.hpp"
#include "andersen/potentials.hpp"
#include "andersen/rng.hpp"

namespace andersen {

enum class CouplingKind { Synchronous, Mirror };

struct CouplingConfig {
  CouplingKind kind = CouplingKind::Mirror;
  // Twist strength of the mirror coupling; ignored for Synchronous.
  // default_torus_gamma() gives the standard choice on the torus.
  double gamma = 0.0;
  double lambda = 1.0;
  double beta = 1.0;
  double t_end = 0.0;
  FlowConfig flow;

  void validate() const;
};

// 1 / (sqrt(beta) * R) with R = ell/2 + m / (sqrt(beta) * lambda).
double default_torus_gamma(double beta, double lambda, std::size_t m, double ell);

// Maximal-coupling proposal for one refreshed velocity block.  Given the
// first copy's fresh Gaussian block a ~ N(0, 1/beta)^n, the block difference
// b, and u uniform on (0,1), returns the second copy's block:
//
//   a + gamma*b           if log u < -(beta/2) (|a + gamma*b|^2 - |a|^2)
//   a - 2 (e_b . a) e_b   otherwise, with e_b = b/|b|
//
// For b = 0 the threshold is 0 > log u, so the proposal is always accepted
// and a is returned unchanged; the reflection branch is unreachable then.
std::vector<double> coupled_velocity(const std::vector<double>& a, const std::vector<double>& b,
                                     double u, double gamma, double beta,
                                     bool* accepted = nullptr);
double coupled_velocity(double a, double b, double u, double gamma, double beta,
                        bool* accepted = nullptr);

// Probability that the proposal above is rejected, as a function of
// s = sqrt(beta) * gamma * |b|: exactly erf(s / (2 sqrt 2)), which is
// bounded by s / sqrt(2 pi).
double rejection_probability_exact(double s);
double rejection_probability_bound(double s);

// One coupled refreshment on Euclidean space: particle `index` of both
// copies gets a new velocity block, the first copy a, the second the
// coupled block with b = (position difference of that particle's block).
void coupled_substitution(CoupledPair& y, std::size_t index, const std::vector<double>& a,
                          double u, const CouplingConfig& cfg, std::size_t n);

// Same on the torus in difference coordinates: v_i <- a and w_i <- a - a~
// with scalar b = minimal_difference(z_i, w_i) taken at the pre-jump state.
void coupled_substitution(TorusCoupledState& y, std::size_t index, double a, double u,
                          const CouplingConfig& cfg, double ell);

using PairRecordCallback = std::function<void(std::size_t k, double t, const CoupledPair&)>;
using TorusRecordCallback = std::function<void(std::size_t k, double t, const TorusCoupledState&)>;

// Coupled simulation on Euclidean space.  The first copy consumes the random
// stream exactly like simulate_andersen, so with the same Rng its marginal
// trajectory is reproduced bit for bit.
void simulate_coupling(CoupledPair& y, const SpaceSpec& space, const Potential& U,
                       const CouplingConfig& cfg, const std::vector<double>& record, Rng& rng,
                       const PairRecordCallback& on_record);

// Coupled simulation on the torus in difference coordinates.
void simulate_coupling(TorusCoupledState& y, const SpaceSpec& space, const Potential& U,
                       const CouplingConfig& cfg, const std::vector<double>& record, Rng& rng,
                       const TorusRecordCallback& on_record);

std::vector<CoupledPair> simulate_coupling(CoupledPair y0, const SpaceSpec& space,
                                           const Potential& U, const CouplingConfig& cfg,
                                           const std::vector<double>& record, Rng& rng);
std::vector<TorusCoupledState> simulate_coupling(TorusCoupledState y0, const SpaceSpec& space,
                                                 const Potential& U, const CouplingConfig& cfg,
                                                 const std::vector<double>& record, Rng& rng);

}  // namespace andersen
