#include "lagbulk/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "lagbulk/errors.hpp"

namespace lagbulk {

double ScalingParams::scale() const { return 4.0 * std::sqrt(n0); }

double ScalingParams::unscale(double lambda) const { return mu + lambda / scale(); }

std::string_view to_string(CountSource s) { return s == CountSource::matrix ? "matrix" : "sde"; }

namespace spectral {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void validate(const SymTridiagonal& t) {
  if (t.diag.empty()) throw ParameterError("empty tridiagonal matrix");
  if (t.offdiag.size() + 1 != t.diag.size()) {
    throw ParameterError("tridiagonal matrix needs k diagonal and k-1 off-diagonal entries");
  }
  for (double e : t.offdiag) {
    if (!(e > 0.0)) throw DomainError("Sturm counting requires strictly positive off-diagonal entries");
  }
}

std::vector<double> squares(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double e) { return e * e; });
  return out;
}

double bisect_index(std::span<const double> diag, std::span<const double> offdiag_sq, int index,
                    double lo, double hi, double tol) {
  // Invariant: count(lo) <= index < count(hi).
  for (int iter = 0; iter < 256 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count_unchecked(diag, offdiag_sq, mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
struct GaussLegendre {
  static constexpr int kOrder = 24;
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};

  GaussLegendre() {
    for (int i = 0; i < kOrder; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
      double dp = 1.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= kOrder; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre rule;
  return rule;
}

}  // namespace

int sturm_count_unchecked(std::span<const double> diag, std::span<const double> offdiag_sq, double x) {
  int negatives = 0;
  double pivot = 1.0;
  for (std::size_t l = 0; l < diag.size(); ++l) {
    const double shifted = diag[l] - x;
    pivot = l == 0 ? shifted : shifted - offdiag_sq[l - 1] / pivot;
    if (pivot == 0.0) pivot = -kEps * (std::abs(diag[l]) + std::abs(x) + 1.0);
    if (pivot < 0.0) ++negatives;
  }
  return negatives;
}

int sturm_count(const SymTridiagonal& t, double x) {
  validate(t);
  const auto sq = squares(t.offdiag);
  return sturm_count_unchecked(t.diag, sq, x);
}

std::pair<double, double> gershgorin_bounds(const SymTridiagonal& t) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const std::size_t k = t.diag.size();
  for (std::size_t i = 0; i < k; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(t.offdiag[i - 1]);
    if (i + 1 < k) radius += std::abs(t.offdiag[i]);
    lo = std::min(lo, t.diag[i] - radius);
    hi = std::max(hi, t.diag[i] + radius);
  }
  // Widen slightly so both ends are strictly off the spectrum.
  const double pad = 4.0 * kEps * std::max({std::abs(lo), std::abs(hi), 1.0});
  return {lo - pad, hi + pad};
}

std::vector<double> eigenvalues(const SymTridiagonal& t, double lo, double hi, double tol) {
  validate(t);
  if (!(lo < hi)) throw ParameterError("eigenvalue window needs lo < hi");
  if (!(tol > 0.0)) throw ParameterError("bisection tolerance must be positive");
  const auto sq = squares(t.offdiag);
  const auto [glo, ghi] = gershgorin_bounds(t);
  const double inf = std::numeric_limits<double>::infinity();
  // Counts of eigenvalues <= lo and <= hi.
  const int first = sturm_count_unchecked(t.diag, sq, std::nextafter(lo, inf));
  const int last = sturm_count_unchecked(t.diag, sq, std::nextafter(hi, inf));
  const double left = std::max(lo, glo);
  const double right = std::min(std::nextafter(hi, inf), ghi);
  std::vector<double> out;
  out.reserve(std::max(0, last - first));
  for (int index = first; index < last; ++index) {
    out.push_back(bisect_index(t.diag, sq, index, left, right, tol));
  }
  return out;
}

std::vector<double> eigenvalues(const SymTridiagonal& t, double tol) {
  validate(t);
  const auto [glo, ghi] = gershgorin_bounds(t);
  return eigenvalues(t, glo, ghi, tol);
}

double eigenvalue_at(const SymTridiagonal& t, int index, double tol) {
  validate(t);
  if (index < 0 || static_cast<std::size_t>(index) >= t.size()) {
    throw ParameterError("eigenvalue index out of range");
  }
  const auto sq = squares(t.offdiag);
  const auto [glo, ghi] = gershgorin_bounds(t);
  return bisect_index(t.diag, sq, index, glo, ghi, tol);
}

ScalingParams scaling_params(double beta, int n, int m, double mu, double kappa_cutoff) {
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  if (n < 1) throw ParameterError("n must be at least 1");
  if (m <= n) throw ParameterError("m must exceed n");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("mu must be positive");
  if (!(kappa_cutoff > 0.0)) throw ParameterError("kappa cutoff must be positive");

  // Extended precision keeps n0 + n1 = n - 1/2 within an ulp after rounding.
  const long double mu2 = static_cast<long double>(mu) * mu;
  const long double diff = m - n;
  ScalingParams p;
  p.beta = beta;
  p.n = n;
  p.m = m;
  p.mu = mu;
  p.kappa_cutoff = kappa_cutoff;
  p.n1 = static_cast<double>((diff - mu2) * (diff - mu2) / (4 * mu2));
  p.n0 = static_cast<double>((2 * static_cast<long double>(m + n) * mu2 - diff * diff - mu2 * mu2) / (4 * mu2) - 0.5L);
  if (!(p.n0 > 0.0)) throw ParameterError("center outside bulk: n0 <= 0");
  p.m1 = static_cast<double>(diff + (diff - mu2) * (diff - mu2) / (4 * mu2));
  p.edge_side = mu > std::sqrt(static_cast<double>(m - n)) ? 1 : -1;

  const double gamma = static_cast<double>(m) / n;
  const double sigma = sv_density(gamma, mu / std::sqrt(static_cast<double>(n)));
  p.n0_from_density = std::numbers::pi * std::numbers::pi / 4.0 * n * sigma * sigma - 0.5;

  const double cut = std::floor(p.n0 - kappa_cutoff * std::max(std::cbrt(p.n1), 1.0));
  p.n2 = static_cast<int>(std::max(0.0, cut));
  return p;
}

double mp_density(double gamma, double x) {
  if (!(gamma >= 1.0)) throw ParameterError("Marchenko-Pastur ratio must be >= 1");
  const double a = std::sqrt(gamma) - 1.0;
  const double b = std::sqrt(gamma) + 1.0;
  if (x < a * a || x > b * b || x <= 0.0) return 0.0;
  return std::sqrt((x - a * a) * (b * b - x)) / (2.0 * std::numbers::pi * x);
}

double mp_cdf(double gamma, double x) {
  if (!(gamma >= 1.0)) throw ParameterError("Marchenko-Pastur ratio must be >= 1");
  const double a = std::sqrt(gamma) - 1.0;
  const double b = std::sqrt(gamma) + 1.0;
  if (x <= a * a) return 0.0;
  if (x >= b * b) return 1.0;
  // x = c + r cos(theta): the square-root factor becomes r sin(theta), leaving a
  // smooth integrand on [theta(x), pi].
  const double c = 0.5 * (a * a + b * b);
  const double r = 0.5 * (b * b - a * a);
  const double theta_x = std::acos(std::clamp((x - c) / r, -1.0, 1.0));
  const auto& rule = gauss_legendre();
  constexpr int kPanels = 32;
  const double width = (std::numbers::pi - theta_x) / kPanels;
  double total = 0.0;
  for (int panel = 0; panel < kPanels; ++panel) {
    const double mid = theta_x + (panel + 0.5) * width;
    for (int i = 0; i < GaussLegendre::kOrder; ++i) {
      const double th = mid + 0.5 * width * rule.nodes[i];
      const double s = std::sin(th);
      const double denom = c + r * std::cos(th);
      if (denom <= 0.0) continue;
      total += rule.weights[i] * r * r * s * s / (2.0 * std::numbers::pi * denom);
    }
  }
  return std::clamp(0.5 * width * total, 0.0, 1.0);
}

double sv_density(double gamma, double x) {
  return 2.0 * std::abs(x) * mp_density(gamma, x * x);
}

std::vector<int> count_scaled(std::span<const double> scaled, std::span<const double> grid) {
  std::vector<int> counts(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double l = grid[i];
    int c = 0;
    if (l > 0.0) {
      for (double p : scaled) c += (p > 0.0 && p <= l) ? 1 : 0;
    } else if (l < 0.0) {
      for (double p : scaled) c -= (p > l && p <= 0.0) ? 1 : 0;
    }
    counts[i] = c;
  }
  return counts;
}

CountingSample counting_function(std::span<const double> points, const ScalingParams& params,
                                 std::span<const double> lambda_grid) {
  std::vector<double> scaled(points.size());
  const double s = params.scale();
  std::transform(points.begin(), points.end(), scaled.begin(),
                 [&](double p) { return s * (p - params.mu); });
  CountingSample out;
  out.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  out.counts = count_scaled(scaled, lambda_grid);
  return out;
}

CountingSample hermite_scaling(std::span<const double> points, int n, double mu,
                               std::span<const double> lambda_grid) {
  if (n < 1) throw ParameterError("n must be at least 1");
  if (!(std::abs(mu) < 2.0 * std::sqrt(static_cast<double>(n)))) {
    throw ParameterError("Hermite center outside bulk: need |mu| < 2 sqrt(n)");
  }
  const double s = std::sqrt(4.0 * n - mu * mu);
  std::vector<double> scaled(points.size());
  std::transform(points.begin(), points.end(), scaled.begin(), [&](double p) { return s * (p - mu); });
  CountingSample out;
  out.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  out.counts = count_scaled(scaled, lambda_grid);
  return out;
}

}  // namespace spectral
}  // namespace lagbulk
