#include "lagbulk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lagbulk/errors.hpp"

namespace lagbulk::stats {

namespace {

constexpr std::size_t kLeaf = 8;

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= kLeaf) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Moments moments(std::span<const double> values) {
  Moments m;
  m.n = values.size();
  if (m.n == 0) return m;
  m.mean = pairwise_sum(values) / static_cast<double>(m.n);
  if (m.n < 2) return m;
  std::vector<double> dev(values.size());
  std::transform(values.begin(), values.end(), dev.begin(), [&](double v) { return (v - m.mean) * (v - m.mean); });
  m.var = pairwise_sum(dev) / static_cast<double>(m.n - 1);
  m.se = std::sqrt(m.var / static_cast<double>(m.n));
  return m;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ParameterError("two-sample KS needs two nonempty samples");
  const auto x = sorted_copy(a);
  const auto y = sorted_copy(b);
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ParameterError("one-sample KS needs a nonempty sample");
  const auto x = sorted_copy(sample);
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double kolmogorov_survival(double x) {
  if (!(x > 0.0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (x < 1.0) {
    // Jacobi-transformed series converges fast for small x.
    double acc = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      acc += std::exp(-odd * odd * pi * pi / (8.0 * x * x));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / x * acc, 0.0, 1.0);
  }
  double acc = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    acc += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

double ks_p_value(double d, std::size_t n) {
  if (n == 0) return 1.0;
  const double root = std::sqrt(static_cast<double>(n));
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

double ks_p_value(double d, std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0) return 1.0;
  const double ne = static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(n1 + n2);
  const double root = std::sqrt(ne);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace lagbulk::stats
