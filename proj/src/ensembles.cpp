#include "lagbulk/ensembles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lagbulk/errors.hpp"

namespace lagbulk::ensembles {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be positive");
}

double vandermonde_log(std::span<const double> lambda) {
  double acc = 0.0;
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    for (std::size_t k = j + 1; k < lambda.size(); ++k) acc += std::log(std::abs(lambda[j] - lambda[k]));
  }
  return acc;
}

void check_length(std::span<const double> lambda, int n) {
  if (n < 1 || lambda.size() != static_cast<std::size_t>(n)) {
    throw ParameterError("expected " + std::to_string(n) + " eigenvalues, got " +
                         std::to_string(lambda.size()));
  }
}

}  // namespace

double sample_chi(double dof, RngStream& stream) {
  if (!(dof > 0.0) || !std::isfinite(dof)) throw ParameterError("chi degrees of freedom must be positive");
  const double log_chi = 0.5 * (std::numbers::ln2 + stream.log_gamma_draw(0.5 * dof));
  const double value = std::exp(log_chi);
  return value > 0.0 && std::isnormal(value) ? value : std::numeric_limits<double>::min();
}

BidiagonalLaguerre sample_laguerre(int n, int m, double beta, RngStream& stream) {
  if (n < 1) throw ParameterError("n must be at least 1");
  if (m <= n) throw ParameterError("m must exceed n");
  check_beta(beta);
  BidiagonalLaguerre b;
  b.n = n;
  b.m = m;
  b.beta = beta;
  b.diag.resize(n);
  b.subdiag.resize(n - 1);
  const double inv_sqrt_beta = 1.0 / std::sqrt(beta);
  // Draw in matrix order: diag[0], subdiag[0], diag[1], ...
  for (int i = 0; i < n; ++i) {
    b.diag[i] = sample_chi(beta * (m - 1 - i), stream) * inv_sqrt_beta;
    if (i + 1 < n) b.subdiag[i] = sample_chi(beta * (n - 1 - i), stream) * inv_sqrt_beta;
  }
  return b;
}

SymTridiagonal double_bidiagonal(const BidiagonalLaguerre& b) {
  const std::size_t n = b.diag.size();
  SymTridiagonal t;
  t.diag.assign(2 * n, 0.0);
  t.offdiag.reserve(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    t.offdiag.push_back(b.diag[i]);
    if (i + 1 < n) t.offdiag.push_back(b.subdiag[i]);
  }
  return t;
}

SymTridiagonal sample_hermite(int n, double beta, RngStream& stream) {
  if (n < 1) throw ParameterError("n must be at least 1");
  check_beta(beta);
  SymTridiagonal t;
  t.diag.resize(n);
  t.offdiag.resize(n - 1);
  const double sd = std::sqrt(2.0 / beta);
  const double inv_sqrt_beta = 1.0 / std::sqrt(beta);
  for (int i = 0; i < n; ++i) {
    t.diag[i] = sd * stream.normal();
    if (i + 1 < n) t.offdiag[i] = sample_chi(beta * (n - 1 - i), stream) * inv_sqrt_beta;
  }
  return t;
}

double log_density_laguerre(std::span<const double> lambda, int n, int m, double beta) {
  check_length(lambda, n);
  check_beta(beta);
  double log_sum = 0.0;
  double sum = 0.0;
  for (double l : lambda) {
    if (!(l > 0.0)) throw DomainError("Laguerre density is supported on positive eigenvalues");
    log_sum += std::log(l);
    sum += l;
  }
  return beta * vandermonde_log(lambda) + (0.5 * beta * (m - n) - 1.0) * log_sum - 0.5 * beta * sum;
}

double log_density_hermite(std::span<const double> lambda, int n, double beta) {
  check_length(lambda, n);
  check_beta(beta);
  double sum_sq = 0.0;
  for (double l : lambda) sum_sq += l * l;
  return beta * vandermonde_log(lambda) - 0.25 * beta * sum_sq;
}

}  // namespace lagbulk::ensembles
