#include "andersen/process.hpp"

#include <cmath>

#include "andersen/errors.hpp"
#include "event_loop.hpp"

namespace andersen {

void AndersenConfig::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("andersen: lambda must be positive");
  if (!(beta > 0.0)) throw ConfigError("andersen: beta must be positive");
  if (!(t_end >= 0.0)) throw ConfigError("andersen: t_end must be nonnegative");
}

std::vector<double> jump_skeleton(double lambda, double t_end, Rng& rng) {
  if (!(lambda > 0.0)) throw ConfigError("jump_skeleton: lambda must be positive");
  std::vector<double> times;
  double t = rng.exponential(lambda);
  while (t < t_end) {
    times.push_back(t);
    t += rng.exponential(lambda);
  }
  return times;
}

void velocity_substitution(std::vector<double>& v, std::size_t index, const std::vector<double>& a,
                           std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) v[index * n + c] = a[c];
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

void simulate_andersen(PhasePoint& y, const SpaceSpec& space, const Potential& U,
                       const AndersenConfig& cfg, const std::vector<double>& record, Rng& rng,
                       const RecordCallback& on_record, const JumpCallback& on_jump) {
  cfg.validate();
  space.validate();
  check_record_grid(record, cfg.t_end);
  const double sigma_v = 1.0 / std::sqrt(cfg.beta);
  PhasePoint before;  // filled only when a jump observer is attached
  detail::run_jump_process(
      y, cfg.lambda, cfg.t_end, space.m, space.n, sigma_v, record, rng,
      [&](PhasePoint& s, double dt) { flow(s, dt, U, space, cfg.flow); },
      [&](PhasePoint& s, double t, std::size_t index, const std::vector<double>& a, double u) {
        if (on_jump) before = s;
        velocity_substitution(s.v, index, a, space.n);
        if (on_jump) on_jump(JumpEvent{t, index, a, u}, before, s);
      },
      [&](std::size_t k, double t, const PhasePoint& s) {
        if (on_record) on_record(k, t, s);
      });
}

std::vector<PhasePoint> simulate_andersen(PhasePoint y0, const SpaceSpec& space, const Potential& U,
                                          const AndersenConfig& cfg,
                                          const std::vector<double>& record, Rng& rng) {
  std::vector<PhasePoint> out(record.size());
  simulate_andersen(
      y0, space, U, cfg, record, rng,
      [&](std::size_t k, double, const PhasePoint& s) { out[k] = s; });
  return out;
}

}  // namespace andersen
