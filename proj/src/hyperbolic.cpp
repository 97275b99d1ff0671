#include "lagbulk/hyperbolic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "lagbulk/errors.hpp"

namespace lagbulk::hyperbolic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_affine(double scale, double shift) {
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(shift)) {
    throw ParameterError("affine generator needs a finite scale > 0 and a finite shift");
  }
}

}  // namespace

Rotation inverse(const Rotation& g) { return {-g.angle}; }

Affine inverse(const Affine& g) { return {1.0 / g.scale, -g.scale * g.shift}; }

Generator inverse(const Generator& g) {
  return std::visit([](const auto& h) -> Generator { return inverse(h); }, g);
}

double principal_angle(double phi) {
  const double r = std::remainder(phi, kTwoPi);
  return r == -kPi ? kPi : r;
}

double lift_affine(double scale, double shift, double phi) {
  const double base = principal_angle(phi);
  const double winding = phi - base;
  if (base == kPi) return phi;
  // With theta = base/2 in (-pi/2, pi/2), x = tan(theta) and the image is
  // atan(a (x + b)); written with atan2 so that x = +-inf needs no special case.
  const double theta = 0.5 * base;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return 2.0 * std::atan2(scale * (s + shift * c), c) + winding;
}

double apply_lifted(const Generator& g, double phi) {
  return std::visit([phi](const auto& h) { return apply_lifted(h, phi); }, g);
}

double apply_lifted(std::span<const Generator> word, double phi) {
  for (const auto& g : word) phi = apply_lifted(g, phi);
  return phi;
}

BoundaryPoint apply_boundary(const Generator& g, BoundaryPoint x) {
  return std::visit(
      Overloaded{
          [x](const Affine& a) -> BoundaryPoint {
            if (x.is_infinite()) return x;
            return a.scale * (x.value() + a.shift);
          },
          [x](const Rotation& r) -> BoundaryPoint {
            // Disk rotation by alpha is x -> (c x + s)/(c - s x) with c, s the
            // cosine and sine of alpha/2.
            const double c = std::cos(0.5 * r.angle);
            const double s = std::sin(0.5 * r.angle);
            const double tol = 4.0 * kEps * (std::abs(c) + std::abs(s));
            if (x.is_infinite()) {
              if (std::abs(s) <= tol) return BoundaryPoint::infinity();
              return -c / s;
            }
            const double num = c * x.value() + s;
            const double den = c - s * x.value();
            if (std::abs(den) <= tol * (1.0 + std::abs(x.value()))) {
              return BoundaryPoint::infinity();
            }
            return num / den;
          }},
      g);
}

BoundaryPoint apply_boundary(std::span<const Generator> word, BoundaryPoint x) {
  for (const auto& g : word) x = apply_boundary(g, x);
  return x;
}

LiftedMoebius::LiftedMoebius(std::initializer_list<Generator> word)
    : LiftedMoebius(std::vector<Generator>(word)) {}

LiftedMoebius::LiftedMoebius(std::vector<Generator> word) : word_(std::move(word)) {
  for (const auto& g : word_) {
    if (const auto* a = std::get_if<Affine>(&g)) check_affine(a->scale, a->shift);
  }
}

LiftedMoebius LiftedMoebius::rotation(double angle) { return LiftedMoebius{Rotation{angle}}; }

LiftedMoebius LiftedMoebius::affine(double scale, double shift) {
  check_affine(scale, shift);
  return LiftedMoebius{Affine{scale, shift}};
}

LiftedMoebius LiftedMoebius::inverse() const {
  std::vector<Generator> out;
  out.reserve(word_.size());
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) out.push_back(hyperbolic::inverse(*it));
  LiftedMoebius result;
  result.word_ = std::move(out);
  return result;
}

LiftedMoebius LiftedMoebius::then(const LiftedMoebius& other) const {
  LiftedMoebius result = *this;
  result.word_.insert(result.word_.end(), other.word_.begin(), other.word_.end());
  return result;
}

LiftedMoebius LiftedMoebius::conjugated_by(const LiftedMoebius& y) const {
  return y.inverse().then(*this).then(y);
}

double cayley(BoundaryPoint x) {
  if (x.is_infinite()) return kPi;
  return 2.0 * std::atan(x.value());
}

BoundaryPoint cayley_inverse(double phi) {
  const double base = principal_angle(phi);
  if (base == kPi) return BoundaryPoint::infinity();
  return std::tan(0.5 * base);
}

std::complex<double> cayley_disk(std::complex<double> z) {
  const std::complex<double> i(0.0, 1.0);
  return (i - z) / (z + i);
}

double ash(std::span<const Generator> word, double x, double y) {
  return (apply_lifted(word, y) - apply_lifted(word, x)) - (y - x);
}

}  // namespace lagbulk::hyperbolic
