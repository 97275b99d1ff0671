#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lagbulk/ensembles.hpp"

namespace lagbulk {

/// Bulk scaling data for the doubled Laguerre matrix centered at mu.
///
///   n0 + 1/2 = (2(m+n) mu^2 - (m-n)^2 - mu^4) / (4 mu^2)
///   n1       = (m - n - mu^2)^2 / (4 mu^2),   n0 + n1 = n - 1/2
///   m1       = m - n + n1
///   n2       = floor(n0 - K max(n1^{1/3}, 1)), clamped at 0
struct ScalingParams {
  double beta = 0.0;
  int n = 0;
  int m = 0;
  double mu = 0.0;
  double n0 = 0.0;
  double n1 = 0.0;
  double m1 = 0.0;
  int n2 = 0;
  double kappa_cutoff = 0.0;
  int edge_side = 1;  // sign of mu - sqrt(m - n)
  // n0 recomputed from the limiting singular-value density, kept for cross-checks.
  double n0_from_density = 0.0;

  /// 4 sqrt(n0): maps spectrum offsets Lambda - mu to the Sine_beta scale.
  double scale() const;
  /// Lambda = mu + lambda / (4 sqrt(n0)).
  double unscale(double lambda) const;
};

enum class CountSource { matrix, sde };
std::string_view to_string(CountSource s);

/// Counting-function values of one replica on a lambda grid.
/// N(l) = #points in (0, l] for l > 0, -#points in (l, 0] for l < 0.
struct CountingSample {
  std::vector<double> lambda_grid;
  std::vector<int> counts;
  std::uint64_t replica_id = 0;
  CountSource source = CountSource::matrix;
};

namespace spectral {

/// Number of eigenvalues strictly below x (pivot-sign Sturm count).
int sturm_count(const SymTridiagonal& t, double x);

/// Sturm count with precomputed squared off-diagonal; no validation.
int sturm_count_unchecked(std::span<const double> diag, std::span<const double> offdiag_sq,
                          double x);

/// [lo, hi] enclosing the whole spectrum.
std::pair<double, double> gershgorin_bounds(const SymTridiagonal& t);

/// All eigenvalues in (lo, hi], ascending, each bisected to width <= tol.
std::vector<double> eigenvalues(const SymTridiagonal& t, double lo, double hi, double tol);
/// Entire spectrum.
std::vector<double> eigenvalues(const SymTridiagonal& t, double tol);
/// The index-th smallest eigenvalue (0-based).
double eigenvalue_at(const SymTridiagonal& t, int index, double tol);

ScalingParams scaling_params(double beta, int n, int m, double mu, double kappa_cutoff);

/// Marchenko-Pastur density with ratio gamma >= 1, support [a^2, b^2], a = sqrt(gamma)-1, b = sqrt(gamma)+1.
double mp_density(double gamma, double x);
/// Its distribution function, by Gauss-Legendre quadrature in the angle variable.
double mp_cdf(double gamma, double x);
/// Limiting singular-value density 2|x| mp_density(gamma, x^2).
double sv_density(double gamma, double x);

/// Counting function of the scaled points 4 sqrt(n0) (p - mu) on the grid.
CountingSample counting_function(std::span<const double> points, const ScalingParams& params,
                                 std::span<const double> lambda_grid);

/// Counting function of sqrt(4n - mu^2) (p - mu); requires |mu| < 2 sqrt(n).
CountingSample hermite_scaling(std::span<const double> points, int n, double mu,
                               std::span<const double> lambda_grid);

/// Counting function of already-scaled points.
std::vector<int> count_scaled(std::span<const double> scaled_points, std::span<const double> lambda_grid);

}  // namespace spectral
}  // namespace lagbulk
