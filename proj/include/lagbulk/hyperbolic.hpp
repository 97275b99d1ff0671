#pragma once

// Lifted Moebius maps acting on the boundary of the hyperbolic plane.
//
// Boundary points of the upper half-plane H live on R u {inf}.  The Cayley map
// U(z) = (i - z)/(z + i) identifies them with the unit circle, and x = tan(phi/2)
// relates a boundary point x to its disk angle phi (0 <-> 0, inf <-> pi).  A
// LiftedMoebius element acts on the universal cover R of the circle; it is
// stored as a word of generators whose lifts are canonical:
//
//   Rotation(alpha):  phi -> phi + alpha
//   Affine(a, b):     x -> a (x + b) on H, lifted so that pi is fixed.
//
// Words act from the right: x.(T1 T2) = (x.T1).T2, i.e. the word is folded
// left to right.

#include <complex>
#include <span>
#include <variant>
#include <vector>

namespace lagbulk::hyperbolic {

/// Point of R u {inf}.  Infinity is a tagged state, never a float sentinel.
class BoundaryPoint {
 public:
  constexpr BoundaryPoint() = default;
  constexpr BoundaryPoint(double value) : value_(value) {}  // NOLINT(implicit)
  static constexpr BoundaryPoint infinity() {
    BoundaryPoint p;
    p.infinite_ = true;
    return p;
  }

  constexpr bool is_infinite() const { return infinite_; }
  /// Finite coordinate; meaningless when is_infinite().
  constexpr double value() const { return value_; }

  friend constexpr bool operator==(const BoundaryPoint& a, const BoundaryPoint& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

struct Rotation {
  double angle;
};

struct Affine {
  double scale;  // a > 0
  double shift;  // b
};

using Generator = std::variant<Rotation, Affine>;

Rotation inverse(const Rotation& g);
Affine inverse(const Affine& g);
Generator inverse(const Generator& g);

/// Canonical lift of x -> a(x + b) fixing pi; requires a > 0.
double lift_affine(double scale, double shift, double phi);

inline double apply_lifted(const Rotation& g, double phi) { return phi + g.angle; }
inline double apply_lifted(const Affine& g, double phi) {
  return lift_affine(g.scale, g.shift, phi);
}
double apply_lifted(const Generator& g, double phi);
double apply_lifted(std::span<const Generator> word, double phi);

BoundaryPoint apply_boundary(const Generator& g, BoundaryPoint x);
BoundaryPoint apply_boundary(std::span<const Generator> word, BoundaryPoint x);

/// Element of the lifted Moebius group, as a generator word.
class LiftedMoebius {
 public:
  LiftedMoebius() = default;
  LiftedMoebius(std::initializer_list<Generator> word);
  explicit LiftedMoebius(std::vector<Generator> word);

  static LiftedMoebius rotation(double angle);
  /// Throws ParameterError unless scale > 0 and both values are finite.
  static LiftedMoebius affine(double scale, double shift);

  std::span<const Generator> word() const { return word_; }
  bool empty() const { return word_.empty(); }

  double apply_lifted(double phi) const { return hyperbolic::apply_lifted(word_, phi); }
  BoundaryPoint apply_boundary(BoundaryPoint x) const {
    return hyperbolic::apply_boundary(word_, x);
  }

  LiftedMoebius inverse() const;
  /// this * other: apply this first, then other.
  LiftedMoebius then(const LiftedMoebius& other) const;
  /// Conjugate X^Y = Y^{-1} X Y.
  LiftedMoebius conjugated_by(const LiftedMoebius& y) const;

 private:
  std::vector<Generator> word_;
};

/// Principal disk angle in (-pi, pi] of a boundary point: 2 atan(x), inf -> pi.
double cayley(BoundaryPoint x);
/// tan(phi/2), with phi = pi (mod 2 pi) mapped to infinity.
BoundaryPoint cayley_inverse(double phi);
/// The disk model map U(z) = (i - z)/(z + i) on the closed upper half-plane.
std::complex<double> cayley_disk(std::complex<double> z);

/// Reduces an angle to the principal branch (-pi, pi].
double principal_angle(double phi);

/// Angular shift ash(T, x, y) = (y*T - x*T) - (y - x).
double ash(std::span<const Generator> word, double x, double y);
inline double ash(const LiftedMoebius& t, double x, double y) { return ash(t.word(), x, y); }

}  // namespace lagbulk::hyperbolic
