#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "lagbulk/errors.hpp"
#include "lagbulk/hyperbolic.hpp"

namespace hb = lagbulk::hyperbolic;
using hb::Affine;
using hb::BoundaryPoint;
using hb::Generator;
using hb::LiftedMoebius;
using hb::Rotation;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Generator> random_word(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_real_distribution<double> angle(-7.0, 7.0), logscale(-3.0, 3.0), shift(-5.0, 5.0);
  std::vector<Generator> w;
  const int k = len(gen);
  for (int i = 0; i < k; ++i) {
    if (gen() & 1) {
      w.emplace_back(Rotation{angle(gen)});
    } else {
      w.emplace_back(Affine{std::exp(logscale(gen)), shift(gen)});
    }
  }
  return w;
}

}  // namespace

TEST_CASE("cayley map examples") {
  CHECK(hb::cayley(0.0) == 0.0);
  CHECK(hb::cayley(1.0) == doctest::Approx(kPi / 2));
  CHECK(hb::cayley(BoundaryPoint::infinity()) == kPi);
  // U(z) = (i - z)/(z + i): 1 -> i, 0 -> 1, real boundary to the unit circle
  CHECK(std::abs(hb::cayley_disk(1.0) - std::complex<double>(0, 1)) < 1e-15);
  CHECK(std::abs(hb::cayley_disk(0.0) - 1.0) < 1e-15);
  for (double x : {-3.0, -0.2, 0.7, 11.0}) {
    const auto u = hb::cayley_disk(x);
    CHECK(std::abs(u) == doctest::Approx(1.0));
    CHECK(std::arg(u) == doctest::Approx(hb::cayley(x)));
  }
  CHECK(hb::cayley_inverse(kPi).is_infinite());
  CHECK(hb::cayley_inverse(-kPi).is_infinite());
  CHECK(hb::cayley_inverse(kPi / 2).value() == doctest::Approx(1.0));
}

TEST_CASE("boundary action examples") {
  CHECK(hb::apply_boundary(Generator{Affine{2, 3}}, 0.0) == BoundaryPoint(6.0));
  CHECK(hb::apply_boundary(Generator{Rotation{kPi}}, 0.0).is_infinite());
  CHECK(hb::apply_boundary(Generator{Affine{2, 3}}, BoundaryPoint::infinity()).is_infinite());
  const LiftedMoebius id;
  CHECK(id.apply_boundary(5.0) == BoundaryPoint(5.0));
  // Rotation by pi/2 moves 0 (angle 0) to angle pi/2, i.e. x = 1.
  CHECK(hb::apply_boundary(Generator{Rotation{kPi / 2}}, 0.0).value() == doctest::Approx(1.0));
}

TEST_CASE("lifted action examples") {
  CHECK(hb::apply_lifted(Generator{Rotation{1.2}}, 0.3) == doctest::Approx(1.5));
  CHECK(hb::apply_lifted(Generator{Affine{2, 0}}, kPi) == kPi);
  CHECK(hb::apply_lifted(Generator{Affine{2, 0}}, 3 * kPi) == 3 * kPi);
  CHECK(hb::apply_lifted(Generator{Affine{2, 0}}, kPi / 2) == doctest::Approx(2 * std::atan(2.0)));
  // The lift of x -> x + b never crosses pi, so the winding is kept.
  CHECK(hb::apply_lifted(Generator{Affine{1, 1e6}}, 0.0) < kPi);
  CHECK(hb::apply_lifted(Generator{Affine{1, -1e6}}, 0.0) > -kPi);
}

TEST_CASE("invalid affine generators") {
  CHECK_THROWS_AS(LiftedMoebius::affine(0.0, 1.0), lagbulk::ParameterError);
  CHECK_THROWS_AS(LiftedMoebius::affine(-1.0, 1.0), lagbulk::ParameterError);
  CHECK_THROWS_AS(LiftedMoebius::affine(1.0, NAN), lagbulk::ParameterError);
}

TEST_CASE("quasiperiodicity, monotonicity and consistency over random words") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> phi_dist(-20.0, 20.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto w = random_word(gen);
    const double phi = phi_dist(gen);
    const double f = hb::apply_lifted(w, phi);
    CHECK(std::abs(hb::apply_lifted(w, phi + 2 * kPi) - f - 2 * kPi) < 1e-10);

    double prev = hb::apply_lifted(w, -10.0);
    for (int j = 1; j <= 200; ++j) {
      const double next = hb::apply_lifted(w, -10.0 + 0.1 * j);
      REQUIRE(next > prev);
      prev = next;
    }

    const BoundaryPoint x = std::tan(phi / 2);
    const BoundaryPoint bx = hb::apply_boundary(w, x);
    const double half = std::tan(f / 2);
    if (!bx.is_infinite() && std::abs(half) < 1e8) {
      CHECK(std::abs(half - bx.value()) <= 1e-8 * std::max(1.0, std::abs(bx.value())));
    }
  }
}

TEST_CASE("word algebra") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const LiftedMoebius t(random_word(gen));
    const LiftedMoebius y(random_word(gen));
    const double phi = 0.37 * trial - 10.0;
    CHECK(t.then(t.inverse()).apply_lifted(phi) == doctest::Approx(phi).epsilon(1e-9));
    const double lhs = t.conjugated_by(y).apply_lifted(phi);
    const double rhs = y.apply_lifted(t.apply_lifted(y.inverse().apply_lifted(phi)));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("angular shift") {
  std::mt19937_64 gen(5);
  const auto t = LiftedMoebius{Affine{1.7, -0.4}, Rotation{0.3}};
  CHECK(hb::ash(t, 0.4, 0.4) == 0.0);
  CHECK(hb::ash(LiftedMoebius::rotation(1.1), 0.2, 2.9) == doctest::Approx(0.0));

  SUBCASE("example map A(1.1, 0.05)") {
    const double a = 1.1, b = 0.05;
    const std::complex<double> z(-b, (1 - a) / a);
    const double x = 0.0, y = 1.0;
    const double eps2 = hb::ash(LiftedMoebius::affine(a, b), x, y) +
                        std::real((std::exp(std::complex<double>(0, -y)) - std::exp(std::complex<double>(0, -x))) * z);
    const double bound = std::abs(std::exp(std::complex<double>(0, y)) - std::exp(std::complex<double>(0, x))) *
                         std::norm(z);
    CHECK(std::abs(eps2) <= 10 * bound);
  }

  SUBCASE("expansion errors scale like |z|^2 and |z|^3") {
    // Error ratios stay bounded as |z| shrinks: a single constant covers every sample.
    std::uniform_real_distribution<double> ang(-kPi, kPi), radius(0.0, 1.0 / 3.0);
    double c2 = 0.0, c3 = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const std::complex<double> z = std::polar(radius(gen), ang(gen));
      const double a = 1.0 / (1.0 + z.imag());
      const double b = -z.real();
      const double x = ang(gen), y = ang(gen);
      const std::complex<double> v = std::exp(std::complex<double>(0, x));
      const std::complex<double> w = std::exp(std::complex<double>(0, y));
      const double s = hb::ash(LiftedMoebius::affine(a, b), x, y);
      const std::complex<double> dw = std::conj(w) - std::conj(v);
      const double e2 = s + std::real(dw * z);
      const std::complex<double> iu(0, 1);
      const double e3 = s - std::real(dw * (-z - iu * (2.0 + std::conj(v) + std::conj(w)) * z * z / 4.0));
      const double wv = std::abs(w - v);
      if (wv == 0.0 || std::abs(z) == 0.0) continue;
      c2 = std::max(c2, std::abs(e2) / (wv * std::norm(z)));
      c3 = std::max(c3, std::abs(e3) / (wv * std::pow(std::abs(z), 3)));
    }
    CHECK(c2 < 10.0);
    CHECK(c3 < 10.0);
  }
}
