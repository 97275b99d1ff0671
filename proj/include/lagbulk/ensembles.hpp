#pragma once

#include <span>
#include <vector>

#include "lagbulk/rng.hpp"

namespace lagbulk {

/// Symmetric tridiagonal matrix: k diagonal entries and k-1 off-diagonal entries.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const { return diag.size(); }
};

/// n x n lower-bidiagonal beta-Laguerre model.  diag[i] carries
/// chi_{beta(m-1-i)}/sqrt(beta) and subdiag[i] carries chi_{beta(n-1-i)}/sqrt(beta),
/// so that the eigenvalues of B B^T follow the Laguerre density with parameters (n, m).
struct BidiagonalLaguerre {
  int n = 0;
  int m = 0;
  double beta = 0.0;
  std::vector<double> diag;
  std::vector<double> subdiag;
};

namespace ensembles {

/// One chi_dof draw: sqrt of a Gamma(dof/2, scale 2) draw.  Strictly positive;
/// draws below the smallest normal double are clamped to it.
double sample_chi(double dof, RngStream& stream);

BidiagonalLaguerre sample_laguerre(int n, int m, double beta, RngStream& stream);

/// 2n x 2n zero-diagonal tridiagonal matrix with off-diagonal
/// diag[0], subdiag[0], diag[1], ..., diag[n-1]; its eigenvalues are +-(singular values of B).
SymTridiagonal double_bidiagonal(const BidiagonalLaguerre& b);

/// Tridiagonal beta-Hermite model: N(0, 2/beta) diagonal and
/// chi_{beta(n-1)}/sqrt(beta), ..., chi_beta/sqrt(beta) off the diagonal.
SymTridiagonal sample_hermite(int n, double beta, RngStream& stream);

/// Unnormalized Laguerre log-density
///   beta sum_{j<k} log|l_j - l_k| + (beta/2 (m-n) - 1) sum log l_k - beta/2 sum l_k.
double log_density_laguerre(std::span<const double> lambda, int n, int m, double beta);

/// Unnormalized Hermite log-density  beta sum_{j<k} log|l_j - l_k| - beta/4 sum l_k^2.
double log_density_hermite(std::span<const double> lambda, int n, double beta);

}  // namespace ensembles
}  // namespace lagbulk
