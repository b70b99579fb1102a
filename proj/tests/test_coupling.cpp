#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "andersen/coupling.hpp"
#include "andersen/errors.hpp"
#include "andersen/process.hpp"
#include "andersen/rng.hpp"

using namespace andersen;

TEST_CASE("coupled velocity, worked scalar cases") {
  bool acc = false;
  // a = b = gamma = beta = 1: threshold is log u < -3/2
  CHECK(coupled_velocity(1.0, 1.0, 0.1, 1.0, 1.0, &acc) == 2.0);  // log 0.1 = -2.30
  CHECK(acc);
  CHECK(coupled_velocity(1.0, 1.0, 0.5, 1.0, 1.0, &acc) == -1.0);  // log 0.5 = -0.69
  CHECK_FALSE(acc);
  // b = 0 accepts regardless of u and returns a unchanged
  CHECK(coupled_velocity(1.7, 0.0, 1.0 - 1e-16, 3.0, 2.0, &acc) == 1.7);
  CHECK(acc);
  // gamma = 0 makes the threshold 0, and log u < 0 for every u in (0,1)
  CHECK(coupled_velocity(-0.4, 2.0, 1.0 - 1e-16, 0.0, 1.0, &acc) == -0.4);
  CHECK(acc);
}

TEST_CASE("coupled velocity, vector branch geometry") {
  bool acc = false;
  auto out = coupled_velocity({1.0, 2.0}, {1.0, 0.0}, 0.1, 1.0, 1.0, &acc);
  CHECK(acc);
  CHECK(out == std::vector<double>{2.0, 2.0});  // a + gamma b

  out = coupled_velocity({1.0, 2.0}, {1.0, 0.0}, 0.9, 1.0, 1.0, &acc);
  CHECK_FALSE(acc);
  CHECK(out[0] == -1.0);  // reflected along b
  CHECK(out[1] == 2.0);   // untouched orthogonal to b

  // the rejection branch is an isometry and moves a only along b
  Rng rng(31);
  for (int k = 0; k < 20000; ++k) {
    std::vector<double> a = {rng.normal(), rng.normal(), rng.normal()};
    std::vector<double> b = {rng.normal(), rng.normal(), rng.normal()};
    auto at = coupled_velocity(a, b, rng.uniform(), 0.8, 1.0, &acc);
    if (acc) {
      for (int i = 0; i < 3; ++i) CHECK(at[i] == a[i] + 0.8 * b[i]);
    } else {
      double na = 0.0, nt = 0.0;
      for (int i = 0; i < 3; ++i) {
        na += a[i] * a[i];
        nt += at[i] * at[i];
      }
      CHECK(std::abs(std::sqrt(na) - std::sqrt(nt)) < 1e-12);
      // (at - a) proportional to b: check the cross products vanish
      std::vector<double> d = {at[0] - a[0], at[1] - a[1], at[2] - a[2]};
      CHECK(std::abs(d[0] * b[1] - d[1] * b[0]) < 1e-9);
      CHECK(std::abs(d[1] * b[2] - d[2] * b[1]) < 1e-9);
    }
  }
}

TEST_CASE("rejection probability formula and bound") {
  CHECK(rejection_probability_exact(0.0) == 0.0);
  CHECK(rejection_probability_exact(1.0) ==
        doctest::Approx(std::erf(1.0 / (2.0 * std::sqrt(2.0)))).epsilon(1e-15));
  CHECK(rejection_probability_exact(1.0) == doctest::Approx(0.38292).epsilon(1e-4));
  CHECK(rejection_probability_exact(1e9) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rejection_probability_bound(1.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  // the bound dominates and both are increasing
  double prev = 0.0;
  for (double s = 0.05; s < 3.0; s += 0.05) {
    double p = rejection_probability_exact(s);
    CHECK(p >= prev);
    CHECK(p <= rejection_probability_bound(s));
    prev = p;
  }
}

TEST_CASE("observed rejection frequency matches the formula") {
  const double beta = 1.0, gamma = 1.0;
  const int trials = 100000;
  for (double s : {0.5, 1.0}) {
    double b = s / (std::sqrt(beta) * gamma);
    Rng rng(101);
    int rejects = 0;
    for (int k = 0; k < trials; ++k) {
      bool acc = true;
      coupled_velocity(rng.normal() / std::sqrt(beta), b, rng.uniform(), gamma, beta, &acc);
      if (!acc) ++rejects;
    }
    double freq = static_cast<double>(rejects) / trials;
    double p = rejection_probability_exact(s);
    double se = std::sqrt(p * (1.0 - p) / trials);
    CHECK(std::abs(freq - p) < 4.0 * se);
    CHECK(freq <= rejection_probability_bound(s) + 4.0 * se);
  }
}

TEST_CASE("coupled output keeps the refreshment marginal") {
  // a ~ N(0, 1/beta) in, so the coupled block must come out N(0, 1/beta) too
  const double beta = 2.0, gamma = 1.2, b = 0.8;
  const int trials = 200000;
  Rng rng(102);
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int k = 0; k < trials; ++k) {
    double a = rng.normal() / std::sqrt(beta);
    double at = coupled_velocity(a, b, rng.uniform(), gamma, beta);
    s1 += at;
    s2 += at * at;
    s4 += at * at * at * at;
  }
  double n = trials;
  double mean = s1 / n, var = s2 / n - mean * mean, m4 = s4 / n;
  double sd = std::sqrt(1.0 / beta);
  CHECK(std::abs(mean) < 4.0 * sd / std::sqrt(n));
  CHECK(std::abs(var - 1.0 / beta) < 4.0 * std::sqrt(2.0 / n) / beta);
  CHECK(std::abs(m4 - 3.0 / (beta * beta)) < 5.0 * std::sqrt(96.0 / n) / (beta * beta));
}

TEST_CASE("second moment of rejected blocks obeys the tail bound") {
  // E[|xi|^2 ; rejected] <= (n+1) gamma |b| / sqrt(2 pi beta)
  const double beta = 1.5, gamma = 0.7;
  const int trials = 200000;
  for (std::size_t n : {std::size_t{1}, std::size_t{3}}) {
    std::vector<double> b(n, 0.0);
    b[0] = 0.9;
    Rng rng(103 + n);
    double acc_sum = 0.0, acc_sq = 0.0;
    for (int k = 0; k < trials; ++k) {
      std::vector<double> a(n);
      for (auto& ai : a) ai = rng.normal() / std::sqrt(beta);
      bool acc = true;
      coupled_velocity(a, b, rng.uniform(), gamma, beta, &acc);
      double term = 0.0;
      if (!acc)
        for (double ai : a) term += ai * ai;
      acc_sum += term;
      acc_sq += term * term;
    }
    double est = acc_sum / trials;
    double var = acc_sq / trials - est * est;
    double se = std::sqrt(var / trials);
    double bound = (static_cast<double>(n) + 1.0) * gamma * 0.9 / std::sqrt(2.0 * M_PI * beta);
    CHECK(est <= bound + 4.0 * se);
  }
}

TEST_CASE("coupled substitution, euclidean") {
  CouplingConfig sync;
  sync.kind = CouplingKind::Synchronous;
  CouplingConfig mirror;
  mirror.kind = CouplingKind::Mirror;
  mirror.gamma = 1.0;
  mirror.beta = 1.0;

  CoupledPair y;
  y.first = {{0.0, 0.0, 1.0, 0.0}, {1.0, 2.0, 3.0, 4.0}};
  y.second = {{0.0, 0.0, 0.0, 0.0}, {5.0, 6.0, 7.0, 8.0}};

  SUBCASE("synchronous copies both blocks") {
    coupled_substitution(y, 1, {9.0, 9.5}, 0.5, sync, 2);
    CHECK(y.first.v == std::vector<double>{1.0, 2.0, 9.0, 9.5});
    CHECK(y.second.v == std::vector<double>{5.0, 6.0, 9.0, 9.5});
    CHECK(y.first.x[2] == 1.0);  // positions untouched
  }

  SUBCASE("mirror with a forced accept adds gamma times the block difference") {
    // block 1 difference b = (1, 0) - (0, 0) = (1, 0); u tiny forces accept
    coupled_substitution(y, 1, {0.5, -0.5}, 1e-300, mirror, 2);
    CHECK(y.first.v == std::vector<double>{1.0, 2.0, 0.5, -0.5});
    CHECK(y.second.v == std::vector<double>{5.0, 6.0, 1.5, -0.5});
  }

  SUBCASE("mirror with coincident blocks keeps the copies synchronous") {
    coupled_substitution(y, 0, {0.5, -0.5}, 1.0 - 1e-16, mirror, 2);
    CHECK(y.first.v[0] == 0.5);
    CHECK(y.second.v[0] == 0.5);
  }
}

TEST_CASE("coupled substitution, torus difference coordinates") {
  CouplingConfig mirror;
  mirror.kind = CouplingKind::Mirror;
  mirror.gamma = 1.5;
  mirror.beta = 1.0;
  const double ell = 1.0;

  TorusCoupledState y{{0.1, 0.2}, {1.0, 2.0}, {0.3, 0.8}, {0.25, -0.4}};

  SUBCASE("synchronous zeroes the velocity difference") {
    CouplingConfig sync;
    sync.kind = CouplingKind::Synchronous;
    coupled_substitution(y, 1, 7.0, 0.5, sync, ell);
    CHECK(y.v[1] == 7.0);
    CHECK(y.w[1] == 0.0);
    CHECK(y.z[1] == 0.8);  // positions untouched
  }

  SUBCASE("forced accept drives w to -gamma * zeta") {
    // zeta(0.3) = 0.3 on the unit circle
    coupled_substitution(y, 0, 0.6, 1e-300, mirror, ell);
    CHECK(y.v[0] == 0.6);
    CHECK(y.w[0] == doctest::Approx(-1.5 * 0.3).epsilon(1e-15));
    // component 1: zeta(0.8) = -0.2
    coupled_substitution(y, 1, 0.6, 1e-300, mirror, ell);
    CHECK(y.w[1] == doctest::Approx(-1.5 * (-0.2)).epsilon(1e-15));
  }

  SUBCASE("coincident component accepts and stays coincident") {
    TorusCoupledState s{{0.1}, {1.0}, {0.0}, {0.0}};
    coupled_substitution(s, 0, 0.6, 1.0 - 1e-16, mirror, ell);
    CHECK(s.v[0] == 0.6);
    CHECK(s.w[0] == 0.0);
  }
}

TEST_CASE("default torus gamma") {
  // beta = 1, lambda = 60, m = 10, ell = 1: R = 1/2 + 1/6 = 2/3, gamma = 3/2
  CHECK(default_torus_gamma(1.0, 60.0, 10, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(default_torus_gamma(4.0, 3.0, 3, 2.0) ==
        doctest::Approx(1.0 / (2.0 * (1.0 + 0.5))).epsilon(1e-14));
}

TEST_CASE("coupling config validation") {
  CouplingConfig bad;
  bad.kind = CouplingKind::Mirror;
  bad.gamma = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.gamma = 1.0;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("identical copies remain identical under the mirror coupling") {
  QuadraticPotential pot(std::vector<double>{1.0, 4.0});
  SpaceSpec space{SpaceKind::Euclidean, 2, 1, 0.0};
  CouplingConfig cfg;
  cfg.kind = CouplingKind::Mirror;
  cfg.gamma = 0.8;
  cfg.lambda = 4.0;
  cfg.t_end = 8.0;
  CoupledPair y0;
  y0.first = {{0.7, -0.2}, {0.1, 0.3}};
  y0.second = y0.first;
  Rng rng = Rng::stream(9, 4);
  auto rec = simulate_coupling(y0, space, pot, cfg, {2.0, 4.0, 6.0, 8.0}, rng);
  for (const auto& p : rec) {
    CHECK(p.first.x == p.second.x);
    CHECK(p.first.v == p.second.v);
  }
}

TEST_CASE("first copy of the coupling reproduces the single process bitwise") {
  SUBCASE("euclidean") {
    QuadraticPotential pot(std::vector<double>{1.0, 4.0});
    SpaceSpec space{SpaceKind::Euclidean, 2, 1, 0.0};
    AndersenConfig acfg;
    acfg.lambda = 3.0;
    acfg.beta = 2.0;
    acfg.t_end = 6.0;
    CouplingConfig ccfg;
    ccfg.kind = CouplingKind::Mirror;
    ccfg.gamma = 0.5;
    ccfg.lambda = 3.0;
    ccfg.beta = 2.0;
    ccfg.t_end = 6.0;
    std::vector<double> grid = {1.5, 3.0, 4.5, 6.0};

    Rng r1 = Rng::stream(77, 0);
    auto single = simulate_andersen(PhasePoint{{1.0, 0.0}, {0.0, 0.0}}, space, pot, acfg, grid, r1);
    CoupledPair y0;
    y0.first = {{1.0, 0.0}, {0.0, 0.0}};
    y0.second = {{-0.3, 0.2}, {0.1, 0.0}};
    Rng r2 = Rng::stream(77, 0);
    auto pair = simulate_coupling(y0, space, pot, ccfg, grid, r2);
    REQUIRE(single.size() == pair.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(pair[k].first.x == single[k].x);
      CHECK(pair[k].first.v == single[k].v);
    }
  }

  SUBCASE("torus difference coordinates") {
    SpaceSpec space{SpaceKind::Torus, 3, 1, 1.0};
    TorusCosinePotential pot(3, 1.0, 0.5, 0.2, {{0, 1}, {1, 2}});
    AndersenConfig acfg;
    acfg.lambda = 6.0;
    acfg.beta = 1.0;
    acfg.t_end = 3.0;
    acfg.flow = {FlowMode::Verlet, 1e-2};
    CouplingConfig ccfg;
    ccfg.kind = CouplingKind::Mirror;
    ccfg.gamma = default_torus_gamma(1.0, 6.0, 3, 1.0);
    ccfg.lambda = 6.0;
    ccfg.beta = 1.0;
    ccfg.t_end = 3.0;
    ccfg.flow = {FlowMode::Verlet, 1e-2};
    std::vector<double> grid = {1.0, 2.0, 3.0};

    Rng r1 = Rng::stream(78, 0);
    auto single =
        simulate_andersen(PhasePoint{{0.2, 0.5, 0.8}, {0.0, 0.0, 0.0}}, space, pot, acfg, grid, r1);
    TorusCoupledState y0{{0.2, 0.5, 0.8}, {0.0, 0.0, 0.0}, {0.5, 0.5, 0.5}, {0.0, 0.0, 0.0}};
    Rng r2 = Rng::stream(78, 0);
    auto pair = simulate_coupling(y0, space, pot, ccfg, grid, r2);
    REQUIRE(single.size() == pair.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(pair[k].x == single[k].x);
      CHECK(pair[k].v == single[k].v);
    }
  }
}

TEST_CASE("a record at time zero returns the initial state") {
  ZeroPotential pot(1);
  SpaceSpec space{SpaceKind::Torus, 1, 1, 1.0};
  CouplingConfig cfg;
  cfg.kind = CouplingKind::Mirror;
  cfg.gamma = 1.0;
  cfg.t_end = 1.0;
  TorusCoupledState y0{{0.25}, {0.5}, {0.5}, {0.0}};
  Rng rng = Rng::stream(11, 0);
  auto rec = simulate_coupling(y0, space, pot, cfg, {0.0, 1.0}, rng);
  REQUIRE(rec.size() == 2);
  CHECK(rec[0].x == y0.x);
  CHECK(rec[0].z == y0.z);
}
