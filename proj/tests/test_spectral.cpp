#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "lagbulk/errors.hpp"
#include "lagbulk/spectral.hpp"
#include "lagbulk/stats.hpp"
#include "oracles.hpp"

using namespace lagbulk;
using namespace lagbulk::spectral;

namespace {

constexpr double kPi = std::numbers::pi;

SymTridiagonal random_tridiagonal(std::mt19937_64& gen, int k) {
  std::uniform_real_distribution<double> d(-3.0, 3.0), o(0.1, 2.0);
  SymTridiagonal t;
  for (int i = 0; i < k; ++i) t.diag.push_back(d(gen));
  for (int i = 0; i + 1 < k; ++i) t.offdiag.push_back(o(gen));
  return t;
}

}  // namespace

TEST_CASE("sturm count examples") {
  const SymTridiagonal t{{2.0, 2.0}, {1.0}};
  CHECK(sturm_count(t, 2.0) == 1);
  CHECK(sturm_count(t, 0.5) == 0);
  CHECK(sturm_count(t, 3.5) == 2);
  CHECK(sturm_count(t, -(2.0 + 2.0 * 1.0) - 0.1) == 0);
  CHECK_THROWS_AS(sturm_count(SymTridiagonal{{1.0, 1.0}, {0.0}}, 0.0), DomainError);
  CHECK_THROWS_AS(sturm_count(SymTridiagonal{{1.0, 1.0}, {}}, 0.0), ParameterError);
}

TEST_CASE("sturm count is monotone and totals k") {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_tridiagonal(gen, 2 + trial % 20);
    const auto [lo, hi] = gershgorin_bounds(t);
    CHECK(sturm_count(t, lo) == 0);
    CHECK(sturm_count(t, hi) == static_cast<int>(t.size()));
    int prev = 0;
    for (int j = 0; j <= 400; ++j) {
      const int c = sturm_count(t, lo + (hi - lo) * j / 400.0);
      REQUIRE(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("doubled matrix: counts outside (-x, x) are twice the singular values >= x") {
  RngStream s(2, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto b = ensembles::sample_laguerre(3 + trial, 10 + 2 * trial, 1.0 + trial % 3, s);
    const auto t = ensembles::double_bidiagonal(b);
    const auto sv = oracle::singular_values(b);
    const int k = static_cast<int>(t.size());
    for (double x : {0.5, 1.7, 3.1, 4.4}) {
      const int outside = sturm_count(t, -x) + (k - sturm_count(t, x));
      int above = 0;
      for (double v : sv) above += v >= x;
      CHECK(outside == 2 * above);
    }
  }
}

TEST_CASE("eigenvalue examples") {
  const SymTridiagonal t{{2.0, 2.0}, {1.0}};
  const auto ev = eigenvalues(t, 1e-12);
  REQUIRE(ev.size() == 2);
  CHECK(std::abs(ev[0] - 1.0) < 1e-12);
  CHECK(std::abs(ev[1] - 3.0) < 1e-12);
  CHECK(eigenvalues(t, 1.5, 4.0, 1e-12).size() == 1);
  CHECK(std::abs(eigenvalue_at(t, 1, 1e-13) - 3.0) < 1e-12);
  CHECK_THROWS_AS(eigenvalues(t, 2.0, 1.0, 1e-12), ParameterError);

  const BidiagonalLaguerre b{2, 3, 1.0, {1.0, 1.0}, {2.0}};
  const auto dev = eigenvalues(ensembles::double_bidiagonal(b), 1e-13);
  const double r = std::numbers::sqrt2;
  const std::vector<double> expected{-(r + 1), -(r - 1), r - 1, r + 1};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(dev[i] - expected[i]) < 1e-10);
}

TEST_CASE("bisection vs characteristic polynomial roots, n <= 8") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_tridiagonal(gen, 1 + trial % 8);
    const auto ev = eigenvalues(t, 1e-14);
    const auto roots = oracle::characteristic_roots(t);
    REQUIRE(ev.size() == roots.size());
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - roots[i]) < 1e-8);
  }
}

TEST_CASE("bisection vs dense symmetric eigensolver, n <= 200") {
  std::mt19937_64 gen(4);
  for (int k : {10, 57, 128, 200}) {
    const auto t = random_tridiagonal(gen, k);
    const auto ev = eigenvalues(t, 1e-13);
    const auto ref = oracle::eigenvalues(t);
    REQUIRE(ev.size() == ref.size());
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - ref[i]) < 1e-8);
  }
}

TEST_CASE("scaling parameter examples") {
  const auto p = scaling_params(2.0, 100, 200, 10.0, 1.0);
  CHECK(p.n0 == doctest::Approx(99.5));
  CHECK(p.n1 == doctest::Approx(0.0));
  CHECK(p.m1 == doctest::Approx(100.0));
  CHECK(p.n0_from_density == doctest::Approx(99.5).epsilon(1e-12));
  CHECK(p.scale() == doctest::Approx(4 * std::sqrt(99.5)));
  CHECK(p.unscale(p.scale()) == doctest::Approx(11.0));
  // sigma(1)^2 = 4/pi^2 at gamma = 2
  CHECK(sv_density(2.0, 1.0) * sv_density(2.0, 1.0) == doctest::Approx(4 / (kPi * kPi)));

  const auto q = scaling_params(2.0, 100, 200, 12.0, 1.0);
  CHECK(q.n0 == doctest::Approx(96.1389).epsilon(1e-6));
  CHECK(q.n1 == doctest::Approx(3.3611).epsilon(1e-5));
  CHECK(q.n0 + q.n1 == doctest::Approx(99.5));
  CHECK(q.edge_side == 1);
  CHECK(q.n2 == static_cast<int>(std::floor(q.n0 - std::cbrt(q.n1))));
  CHECK(scaling_params(2.0, 100, 200, 8.0, 1.0).edge_side == -1);

  CHECK_THROWS_AS(scaling_params(2.0, 100, 100, 10.0, 1.0), ParameterError);
  CHECK_THROWS_AS(scaling_params(2.0, 100, 200, 0.0, 1.0), ParameterError);
  CHECK_THROWS_WITH_AS(scaling_params(2.0, 100, 200, 30.0, 1.0), doctest::Contains("outside bulk"), ParameterError);
}

TEST_CASE("the two n0 formulas agree") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> nd(1, 5000), gap(1, 5000);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = nd(gen), m = n + gap(gen);
    const double a = std::sqrt(static_cast<double>(m)) - std::sqrt(static_cast<double>(n));
    const double b = std::sqrt(static_cast<double>(m)) + std::sqrt(static_cast<double>(n));
    const double mu = a + (b - a) * u(gen);
    ScalingParams p;
    try {
      p = scaling_params(1.0, n, m, mu, 1.0);
    } catch (const ParameterError&) {
      continue;  // n0 <= 0 near the edge for tiny n
    }
    if (p.n0 < 1.0) continue;
    CHECK(std::abs(p.n0_from_density - p.n0) <= 1e-9 * p.n0);
    CHECK(std::abs(p.n0 + p.n1 - (n - 0.5)) <= 1e-12 * n);
    CHECK(p.n2 >= 0);
  }
}

TEST_CASE("Marchenko-Pastur density") {
  CHECK(mp_density(1.0, 2.0) == doctest::Approx(1 / (2 * kPi)));
  CHECK(mp_density(2.0, 0.1) == 0.0);
  CHECK(mp_density(2.0, 6.0) == 0.0);
  CHECK(mp_density(1.0, 4.5) == 0.0);
  CHECK_THROWS_AS(mp_density(0.5, 1.0), ParameterError);
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double g : {1.0, 2.0, 4.0}) {
    const double a = std::sqrt(g) - 1, b = std::sqrt(g) + 1;
    const double total = integrator.integrate([g](double x) { return mp_density(g, x); }, a * a, b * b);
    CHECK(std::abs(total - 1.0) < 1e-6);
    CHECK(mp_cdf(g, a * a) == 0.0);
    CHECK(mp_cdf(g, b * b) == 1.0);
    for (double f : {0.1, 0.35, 0.5, 0.8}) {
      const double x = a * a + f * (b * b - a * a);
      const double ref = integrator.integrate([g](double y) { return mp_density(g, y); }, a * a, x);
      CHECK(std::abs(mp_cdf(g, x) - ref) < 1e-8);
    }
  }
}

TEST_CASE("singular value density") {
  CHECK(sv_density(2.0, 1.0) == doctest::Approx(2 / kPi));
  for (double x : {0.5, 0.9, 1.7, 2.3}) {
    CHECK(sv_density(2.0, x) == doctest::Approx(2 * x * mp_density(2.0, x * x)));
    CHECK(sv_density(2.0, -x) == sv_density(2.0, x));
  }
}

TEST_CASE("counting function") {
  const auto p = scaling_params(2.0, 100, 200, 10.0, 1.0);
  const std::vector<double> grid{-1.0, 0.0, 1.0};
  const auto empty = counting_function(std::vector<double>{}, p, grid);
  CHECK(empty.counts == std::vector<int>{0, 0, 0});
  const std::vector<double> one_pos{p.unscale(0.5)};
  CHECK(counting_function(one_pos, p, grid).counts == std::vector<int>{0, 0, 1});
  const std::vector<double> one_neg{p.unscale(-0.5)};
  CHECK(counting_function(one_neg, p, grid).counts == std::vector<int>{-1, 0, 0});
  // (0, l] is closed on the right, (l, 0] open on the left
  CHECK(count_scaled(std::vector<double>{1.0, -1.0, 0.0}, grid) == std::vector<int>{-1, 0, 1});
}

TEST_CASE("hermite scaling") {
  const int n = 25;
  const std::vector<double> grid{2 * kPi};
  // mu = 0: factor 2 sqrt(n) = 10
  CHECK(hermite_scaling(std::vector<double>{0.6}, n, 0.0, grid).counts[0] == 1);
  CHECK(hermite_scaling(std::vector<double>{0.7}, n, 0.0, grid).counts[0] == 0);
  CHECK(hermite_scaling(std::vector<double>{}, n, 0.0, grid).counts[0] == 0);
  CHECK_THROWS_AS(hermite_scaling(std::vector<double>{}, n, 10.0, grid), ParameterError);
}

TEST_CASE("hermite bulk intensity at n = 2000") {
  const int n = 2000, reps = 500;
  RngStream s(8, 0);
  std::vector<double> counts;
  const std::vector<double> grid{2 * kPi};
  const double scale = 2 * std::sqrt(static_cast<double>(n));
  for (int r = 0; r < reps; ++r) {
    const auto t = ensembles::sample_hermite(n, 2.0, s);
    const auto ev = eigenvalues(t, -1.0 / scale, 2 * kPi / scale + 1.0 / scale, 1e-12 / scale);
    counts.push_back(hermite_scaling(ev, n, 0.0, grid).counts[0]);
  }
  const auto m = lagbulk::stats::moments(counts);
  CHECK(std::abs(m.mean - 1.0) < 3 * m.se);
}

TEST_CASE("the two bulk scalings agree asymptotically") {
  for (int n : {1000, 10000}) {
    const int m = 2 * n;
    const double c = 3.0, gamma = 2.0;
    const double mu = std::sqrt(c * n);
    const auto p = scaling_params(2.0, n, m, mu, 1.0);
    const double ratio = 4 * std::sqrt(p.n0) / (2 * mu * 2 * kPi * mp_density(gamma, c));
    CHECK(std::abs(ratio - 1.0) < 0.02);
  }
}
