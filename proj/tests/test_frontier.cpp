#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ceglab/allocator.hpp"
#include "ceglab/errors.hpp"
#include "ceglab/frontier.hpp"
#include "ceglab/ingest.hpp"
#include "ceglab/numeric.hpp"
#include "oracles.hpp"

using namespace ceglab;

namespace {

std::vector<FrontierPoint> law_points(double e, double a, double alpha, double lo, double hi,
                                      std::size_t n, double sigma = 0.0, unsigned seed = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<FrontierPoint> pts;
  for (const double c : log_space(lo, hi, n)) {
    const double eps = sigma > 0 ? sigma * noise(rng) : 0.0;
    pts.push_back({c, e + a * std::pow(c, -alpha) * std::exp(eps)});
  }
  return pts;
}

std::vector<FrontierPoint> random_cloud(std::mt19937_64 &rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(1, 50);
  std::vector<FrontierPoint> pts;
  const bool lattice = rng() % 2 == 0; // lattice values force many ties
  for (std::size_t i = 0; i < n; ++i) {
    if (lattice) {
      pts.push_back({static_cast<double>(coarse(rng)), static_cast<double>(coarse(rng))});
    } else {
      pts.push_back({std::pow(10.0, 10 * u(rng)), 1.0 + 5 * u(rng)});
    }
  }
  return pts;
}

} // namespace

TEST_CASE("frontier basics") {
  CHECK(extract_frontier({{3.0, 2.0}}) == std::vector<FrontierPoint>{{3.0, 2.0}});
  const auto f = extract_frontier({{1, 5}, {2, 4}, {3, 4.5}}, 0.0);
  CHECK(f == std::vector<FrontierPoint>{{1, 5}, {2, 4}});
  CHECK_THROWS_AS(extract_frontier(std::vector<FrontierPoint>{}), DomainError);
  // Duplicates collapse and equal-compute points keep the lowest loss.
  CHECK(extract_frontier({{1, 5}, {1, 5}, {1, 3}, {2, 3}}) == std::vector<FrontierPoint>{{1, 3}});
}

TEST_CASE("min_compute drops early points but domination still uses them") {
  const std::vector<FrontierPoint> pts{{1, 3}, {2, 4}, {5, 2}};
  CHECK(extract_frontier(pts, 1.5) == std::vector<FrontierPoint>{{5, 2}});
  CHECK_THROWS_AS(extract_frontier(pts, 10.0), DomainError);
}

TEST_CASE("frontier equals brute-force domination filter") {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> size(1, 10000);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = trial < 5 ? 10000 : (trial < 50 ? 1000 : size(rng) % 400 + 1);
    const auto pts = random_cloud(rng, n);
    const double cutoff = trial % 4 == 0 ? pts[n / 2].compute : 0.0;
    const auto want = oracle::brute_frontier(pts, cutoff);
    if (want.empty()) {
      CHECK_THROWS_AS(extract_frontier(pts, cutoff), DomainError);
      continue;
    }
    const auto got = extract_frontier(pts, cutoff);
    REQUIRE(got == want);
    for (std::size_t i = 1; i < got.size(); ++i) {
      CHECK(got[i].compute > got[i - 1].compute);
      CHECK(got[i].loss < got[i - 1].loss);
    }
  }
}

TEST_CASE("run set pooling uses logged flops") {
  RunSet rs;
  rs.runs.push_back({"a", 1e6, std::nullopt, {{1, 10, 100, 5}, {2, 20, 200, 4}}});
  rs.runs.push_back({"a", 2e6, std::nullopt, {{1, 10, 150, 4.5}, {2, 20, 300, 3.9}}});
  CHECK(pooled_points(rs).size() == 4);
  CHECK(extract_frontier(rs) == std::vector<FrontierPoint>{{100, 5}, {150, 4.5}, {200, 4}, {300, 3.9}});
}

TEST_CASE("fit recovers a noiseless power law") {
  const auto pts = law_points(1.9, 1000.0, 0.094, 1e15, 1e24, 60);
  const PowerLawFit fit = fit_power_law(pts);
  CHECK(fit.E == doctest::Approx(1.9).epsilon(0.01 / 1.9));
  CHECK(std::fabs(fit.alpha - 0.094) < 1e-3);
  CHECK(fit.c_min == 1e15);
  CHECK(fit.c_max == 1e24);
  CHECK(fit.A > 0);
  CHECK(fit.rmse < 1e-3);
}

TEST_CASE("fit recovers the compute-optimal envelope exponent") {
  const LossSurface s = LossSurface::chinchilla();
  std::vector<FrontierPoint> pts;
  for (const double c : log_space(1e16, 1e24, 60)) {
    const double reduced = 813.6 * std::pow(c / 6.0, -0.1535);
    pts.push_back({c, 1.69 + reduced});
  }
  CHECK(std::fabs(fit_power_law(pts).alpha - 0.1535) < 0.002);
  // The same law from first principles along the optimal allocation.
  std::vector<FrontierPoint> env;
  for (const double c : log_space(1e16, 1e24, 60)) {
    const Allocation a = chinchilla_alloc(s, c);
    env.push_back({c, surface_loss(s, a.params, a.tokens)});
  }
  CHECK(std::fabs(fit_power_law(env).alpha - envelope_exponent(s)) < 0.002);
}

TEST_CASE("fit property: random noiseless laws inside the bounds") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ue(1.35, 2.15), ua(0.05, 0.4), ula(1, 4);
  for (int i = 0; i < 25; ++i) {
    const double e = ue(rng), alpha = ua(rng), a = std::pow(10.0, ula(rng));
    if (a * std::pow(1e20, -alpha) < 1e-4) {
      --i; // reduced loss must stay well above the fit's floor gap
      continue;
    }
    const auto pts = law_points(e, a, alpha, 1e8, 1e20, 40);
    const PowerLawFit fit = fit_power_law(pts);
    CHECK(std::fabs(fit.alpha - alpha) < 1e-3);
    CHECK(std::fabs(fit.E - e) < 1e-2);
    CHECK(fit.A == doctest::Approx(a).epsilon(0.05));
  }
}

TEST_CASE("fit property: one percent noise") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const auto pts = law_points(1.8, 300.0, 0.12, 1e10, 1e22, 40, 0.01, seed);
    CHECK(std::fabs(fit_power_law(pts).alpha - 0.12) < 1e-2);
  }
}

TEST_CASE("fixed-E mode and degenerate inputs") {
  const auto pts = law_points(1.9, 1000.0, 0.094, 1e15, 1e24, 30);
  const PowerLawFit fixed = fit_power_law(pts, 1.9, 1.9);
  CHECK(fixed.E == 1.9);
  CHECK(fixed.alpha == doctest::Approx(0.094).epsilon(1e-9));
  CHECK(fixed.A == doctest::Approx(1000.0).epsilon(1e-9));
  CHECK_THROWS_AS(fit_power_law({pts[0], pts[1]}), DomainError);
  CHECK_THROWS_AS(fit_power_law({{1e5, 3}, {1e5, 2.5}, {1e5, 2.4}}), DomainError);
  // All losses below the lower bound leave no feasible E.
  CHECK_THROWS_AS(fit_power_law({{1, 1.1}, {2, 1.05}, {3, 1.01}}), DomainError);
}

TEST_CASE("objective does not increase as exact points are added") {
  const auto all = law_points(1.7, 200.0, 0.2, 1e10, 1e20, 30);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n = 3; n <= all.size(); ++n) {
    const std::vector<FrontierPoint> sub(all.begin(), all.begin() + n);
    const PowerLawFit fit = fit_power_law(sub);
    const double obj = fit.rmse * fit.rmse * static_cast<double>(n);
    CHECK(obj <= prev + 1e-10);
    prev = obj;
  }
}

TEST_CASE("predict_loss") {
  const PowerLawFit f{1.9, 1000.0, 0.094, 1e15, 1e24, 0.0};
  CHECK(predict_loss(f, 1e300).loss == doctest::Approx(1.9).epsilon(1e-9));
  CHECK(predict_loss(f, 1e300).extrapolated);
  CHECK_FALSE(predict_loss(f, 1e18).extrapolated);
  CHECK(predict_loss(f, 1e18).loss ==
        doctest::Approx(1.9 + 1000.0 * std::pow(10.0, -18 * 0.094)).epsilon(1e-14));
  const PowerLawFit g{0.0, 1.0, 1.0, 1.0, 10.0, 0.0};
  CHECK(predict_loss(g, 2.0).loss == doctest::Approx(0.5));
}

TEST_CASE("compute_for_loss inverts predict_loss") {
  const PowerLawFit g{0.0, 1.0, 0.5, 1.0, 1e4, 0.0};
  CHECK(compute_for_loss(g, 0.1) == doctest::Approx(100.0).epsilon(1e-12));
  const PowerLawFit f{1.9, 1000.0, 0.094, 1e15, 1e24, 0.0};
  CHECK_THROWS_AS(compute_for_loss(f, 1.9), UnreachableError);
  CHECK_THROWS_AS(compute_for_loss(f, 1.0), UnreachableError);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 8.0);
  for (int i = 0; i < 50; ++i) {
    const double loss = 1.9 + u(rng);
    CHECK(predict_loss(f, compute_for_loss(f, loss)).loss == doctest::Approx(loss).epsilon(1e-12));
  }
}

TEST_CASE("fit_xy_power") {
  const XYPowerFit unit = fit_xy_power({1, 2}, {1, 2});
  CHECK(unit.a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(unit.b == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> xs{1, 2, 4, 8, 16}, ys;
  for (const double x : xs) {
    ys.push_back(3.0 * std::pow(x, -0.5));
  }
  const XYPowerFit exact = fit_xy_power(xs, ys);
  CHECK(std::fabs(exact.a - 3.0) < 1e-9);
  CHECK(std::fabs(exact.b + 0.5) < 1e-9);
  std::mt19937_64 rng(4);
  std::lognormal_distribution<double> noise(0.0, 0.2);
  xs.clear();
  ys.clear();
  std::vector<double> lx, ly;
  for (int i = 1; i <= 40; ++i) {
    xs.push_back(i * 1.7);
    ys.push_back(2.0 * std::pow(xs.back(), 0.8) * noise(rng));
    lx.push_back(std::log(xs.back()));
    ly.push_back(std::log(ys.back()));
  }
  const auto [icpt, slope] = oracle::normal_equations(lx, ly);
  const XYPowerFit noisy = fit_xy_power(xs, ys);
  CHECK(noisy.b == doctest::Approx(slope).epsilon(1e-10));
  CHECK(noisy.a == doctest::Approx(std::exp(icpt)).epsilon(1e-10));
  CHECK_THROWS_AS(fit_xy_power({1, 2}, {1}), ValidationError);
  CHECK_THROWS_AS(fit_xy_power({1, -2}, {1, 2}), ValidationError);
}

TEST_CASE("fit text format round-trips") {
  const PowerLawFit f{1.87, 512.25, 0.1234, 1e15, 3.5e21, 0.0042};
  const PowerLawFit back = parse_fit(format_fit(f));
  CHECK(back.E == f.E);
  CHECK(back.A == f.A);
  CHECK(back.alpha == f.alpha);
  CHECK(back.c_min == f.c_min);
  CHECK(back.c_max == f.c_max);
  CHECK(back.rmse == f.rmse);
  const PowerLawFit minimal = parse_fit("# hand-written\nE=1.5\nA=10\nalpha=0.2\nruns=4\n");
  CHECK(minimal.c_max == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(parse_fit("E=1.5\nalpha=0.2\n"), ValidationError);
  CHECK_THROWS_AS(parse_fit("E=1.5\nA=abc\nalpha=0.2\n"), ValidationError);
  CHECK_THROWS_AS(read_fit_file("/nonexistent/fit.txt"), IoError);
}

TEST_CASE("synth then fit recovers the generating exponent") {
  const SynthSpec spec = SynthSpec::defaults();
  const LossSurface &s = spec.surface;
  const PowerLawFit fit = fit_power_law(extract_frontier(synthesize_runs(spec)));
  CHECK(std::fabs(fit.alpha - envelope_exponent(s)) < 0.005);
  CHECK(std::fabs(fit.E - s.E) < 0.02);
}
