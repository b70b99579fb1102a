#pragma once

#include <cmath>
#include <cstdint>

namespace andersen {

// Counter-style random stream with deterministic per-replica derivation.
//
// The generator is splitmix64: the state advances by a fixed odd increment
// and each output is a bijective mix of the state.  Stream starting points
// are derived from (master_seed, replica, tag) with the same mix, so every
// (replica, tag) pair owns an independent stream and results never depend
// on how replicas are scheduled across threads.
//
// Tag conventions used by the simulators:
//   tag 0: jump-event draws, in fixed order per event:
//          1 uniform (exponential gap), 1 uniform (particle index),
//          2 uniforms per Gaussian velocity component (Box-Muller without
//          caching), 1 uniform (coupling acceptance variable u).
//   tag 1: initial-condition draws.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  static Rng stream(std::uint64_t master_seed, std::uint64_t replica, std::uint64_t tag = 0) {
    std::uint64_t s = mix64(master_seed + kIncrement * (replica + 1));
    s = mix64(s + kIncrement * (tag + 1));
    return Rng(s);
  }

  std::uint64_t next_u64() {
    state_ += kIncrement;
    return mix64(state_);
  }

  // Uniform on the open interval (0, 1); safe under log().
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Exponential waiting time with the given rate (one uniform).
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // Standard normal via Box-Muller.  Always consumes exactly two uniforms
  // and discards the sine branch, so the draw count per call is fixed.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Uniform index in {0, ..., m-1} (one uniform).
  std::size_t uniform_index(std::size_t m) {
    std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(m));
    return i < m ? i : m - 1;
  }

 private:
  static constexpr std::uint64_t kIncrement = 0x9e3779b97f4a7c15ULL;
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace andersen
