#include <doctest.h>

#include <cmath>
#include <random>

#include "ceglab/allocator.hpp"
#include "ceglab/errors.hpp"
#include "ceglab/numeric.hpp"
#include "oracles.hpp"

using namespace ceglab;

namespace {
const LossSurface kS = LossSurface::chinchilla();
const KaplanFixed kK{};
} // namespace

TEST_CASE("surface_loss") {
  CHECK(surface_loss(kS, 1.0, 1.0) == doctest::Approx(818.79).epsilon(1e-12));
  CHECK(surface_loss(kS, 1e300, 1e300) == doctest::Approx(1.69).epsilon(1e-9));
  CHECK(surface_loss(kS, 6.45e8, 2.585e10) == doctest::Approx(2.60).epsilon(2e-3));
  CHECK(surface_loss(kS, 1e9, 2e10) == doctest::Approx(oracle::chinchilla_loss(1e9, 2e10)));
}

TEST_CASE("optimal_g") {
  LossSurface sym;
  sym.A = sym.B = 300.0;
  sym.alpha = sym.beta = 0.3;
  CHECK(optimal_g(sym) == doctest::Approx(1.0).epsilon(1e-14));
  const double g = std::pow(0.34 * 406.4 / (0.28 * 410.7), 1.0 / 0.62);
  CHECK(optimal_g(kS) == doctest::Approx(g).epsilon(1e-14));
  CHECK(optimal_g(kS) == doctest::Approx(1.345).epsilon(1e-3));
  LossSurface scaled = kS;
  scaled.A *= 7.5;
  scaled.B *= 7.5;
  CHECK(optimal_g(scaled) == doctest::Approx(optimal_g(kS)).epsilon(1e-14));
}

TEST_CASE("chinchilla_alloc examples and identities") {
  const Allocation a = chinchilla_alloc(kS, 1e20);
  CHECK(a.params == doctest::Approx(6.45e8).epsilon(2e-3));
  CHECK(a.tokens == doctest::Approx(2.59e10).epsilon(3e-3));
  CHECK(a.compute == 1e20);
  for (const double c : log_space(1e16, 1e24, 20)) {
    const Allocation x = chinchilla_alloc(kS, c);
    CHECK(6.0 * x.params * x.tokens == doctest::Approx(c).epsilon(1e-14));
    const Allocation y = chinchilla_alloc(kS, 2.0 * c);
    CHECK(y.params / x.params == doctest::Approx(std::pow(2.0, 0.28 / 0.62)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(chinchilla_alloc(kS, 0.0), ValidationError);
  CHECK_THROWS_AS(chinchilla_alloc(kS, -1.0), ValidationError);
}

TEST_CASE("chinchilla allocation beats perturbations at fixed compute") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> logc(16, 24);
  std::uniform_real_distribution<double> eps(1e-6, 0.5);
  for (int i = 0; i < 200; ++i) {
    const double c = std::pow(10.0, logc(rng));
    const Allocation a = chinchilla_alloc(kS, c);
    const double best = surface_loss(kS, a.params, a.tokens);
    for (const double sign : {-1.0, 1.0}) {
      const double n = a.params * (1.0 + sign * eps(rng));
      const double d = c / (6.0 * n);
      CHECK(surface_loss(kS, n, d) >= best - 1e-12);
    }
  }
}

TEST_CASE("kaplan_alloc") {
  const Allocation a = kaplan_alloc(kK, 1e20);
  CHECK(a.params == doctest::Approx(1.43e9).epsilon(3e-3));
  CHECK(a.tokens == doctest::Approx(1.16e10).epsilon(5e-3));
  CHECK(6.0 * a.params * a.tokens == doctest::Approx(9.9e19).epsilon(5e-3));
  const Allocation s = kaplan_alloc(kK, 1e16);
  CHECK(s.tokens / s.params == doctest::Approx(560).epsilon(5e-3));
  CHECK(kK.pN + kK.pD == doctest::Approx(1.0).epsilon(1e-12));
  for (const double c : log_space(1e16, 1e24, 50)) {
    const Allocation x = kaplan_alloc(kK, c);
    CHECK(std::fabs(6.0 * x.params * x.tokens / c - 1.0) < 0.015);
  }
  CHECK_THROWS_AS(kaplan_alloc(kK, 0.0), ValidationError);
}

TEST_CASE("allocate dispatches on policy") {
  const Allocation a = allocate(ChinchillaOptimal{kS}, 1e21);
  CHECK(a.params == chinchilla_alloc(kS, 1e21).params);
  const Allocation b = allocate(kK, 1e21);
  CHECK(b.params == kaplan_alloc(kK, 1e21).params);
}

TEST_CASE("envelope is an exact power law") {
  const double gamma = 0.34 * 0.28 / 0.62;
  CHECK(envelope_exponent(kS) == doctest::Approx(gamma).epsilon(1e-15));
  std::vector<double> lx, ly;
  for (const double c : log_space(1e14, 1e26, 30)) {
    const Allocation a = chinchilla_alloc(kS, c);
    lx.push_back(std::log(c));
    ly.push_back(std::log(surface_loss(kS, a.params, a.tokens) - kS.E));
    CHECK(envelope_loss(kS, c) ==
          doctest::Approx(surface_loss(kS, a.params, a.tokens)).epsilon(1e-12));
  }
  const auto [icpt, slope] = oracle::normal_equations(lx, ly);
  CHECK(std::fabs(slope + gamma) < 1e-9);
  for (std::size_t i = 0; i < lx.size(); ++i) {
    CHECK(std::fabs(icpt + slope * lx[i] - ly[i]) < 1e-9);
  }
  // Reported in terms of C/6 elsewhere; check amplitude consistency directly.
  CHECK(envelope_amplitude(kS) > 0.0);
}

TEST_CASE("chinchilla_compute_for_loss") {
  CHECK(chinchilla_compute_for_loss(kS, 2.69) == doctest::Approx(5.4e19).epsilon(1e-2));
  const Allocation a = chinchilla_alloc(kS, 1e20);
  const double l = surface_loss(kS, a.params, a.tokens);
  CHECK(chinchilla_compute_for_loss(kS, l) == doctest::Approx(1e20).epsilon(1e-10));
  CHECK(chinchilla_compute_for_loss(kS, 2.60) == doctest::Approx(1e20).epsilon(1e-2));
  CHECK_THROWS_AS(chinchilla_compute_for_loss(kS, 1.69), UnreachableError);
  CHECK_THROWS_AS(chinchilla_compute_for_loss(kS, 1.0), UnreachableError);
  for (const double c : log_space(1e15, 1e27, 25)) {
    const double loss = envelope_loss(kS, c);
    CHECK(chinchilla_compute_for_loss(kS, loss) == doctest::Approx(c).epsilon(1e-6));
    CHECK(chinchilla_compute_for_loss_numeric(kS, loss) == doctest::Approx(c).epsilon(1e-6));
  }
}

TEST_CASE("rebalance multiplier exact form") {
  CHECK(rebalance_multiplier_exact(kS, kK, 1.3e22) == doctest::Approx(3.7).epsilon(0.1 / 3.7));
  const double m25 = rebalance_multiplier_exact(kS, kK, 2e23);
  CHECK(m25 >= 9.0);
  CHECK(m25 <= 10.0);
  double best = 1e300, arg = 0;
  for (const double c : log_space(1e16, 1e24, 400)) {
    const double m = rebalance_multiplier_exact(kS, kK, c);
    if (m < best) {
      best = m;
      arg = c;
    }
  }
  CHECK(arg > 1e18);
  CHECK(arg < 2e19);
  CHECK(best == doctest::Approx(1.0).epsilon(0.05));
  for (const double c : log_space(1e14, 1e26, 500)) {
    CHECK(rebalance_multiplier_exact(kS, kK, c) >= 1.0 - 1e-2);
  }
  // Independent composition from the raw formulas.
  const double c = 7e21;
  const double n = 3.6e-6 * std::pow(c, 0.73), d = 4.6e4 * std::pow(c, 0.27);
  const double loss = oracle::chinchilla_loss(n, d);
  const double copt = oracle::bisect(
      [&](double x) {
        const double nn = optimal_g(kS) * std::pow(x / 6.0, 0.28 / 0.62);
        return oracle::chinchilla_loss(nn, x / (6.0 * nn)) - loss;
      },
      1.0, 1e40);
  CHECK(rebalance_multiplier_exact(kS, kK, c) == doctest::Approx(c / copt).epsilon(1e-9));
}

TEST_CASE("rebalance multiplier approximation") {
  CHECK(rebalance_multiplier_approx(1e23) == doctest::Approx(2.96).epsilon(2e-3));
  CHECK(rebalance_multiplier_approx(2e23) == doctest::Approx(4.2).epsilon(5e-3));
  // The approximation undershoots the exact composition at large compute.
  for (const double c : {1e22, 1e23, 1e24}) {
    const double ratio = rebalance_multiplier_approx(c) / rebalance_multiplier_exact(kS, kK, c);
    CHECK(ratio < 0.6);
  }
}

TEST_CASE("surface validation") {
  LossSurface bad = kS;
  bad.alpha = 1.2;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = kS;
  bad.A = 0;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = kS;
  bad.E = -0.1;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  CHECK_NOTHROW(validate(kS));
  KaplanFixed k;
  k.cN = -1;
  CHECK_THROWS_AS(validate(k), ValidationError);
}
