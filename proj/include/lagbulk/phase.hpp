#pragma once

// Phase functions of the doubled Laguerre matrix.
//
// Conjugating the 2n x 2n doubled matrix by a positive diagonal matrix turns it
// into the tridiagonal form
//
//        [ 0      p0+X0                              ]
//        [ p1     0      s0+Y0                       ]
//        [        s1     0      p1+X1                ]
//        [               ...    ...    ...           ]
//        [                      p_n    0             ]
//
// with p_j = sqrt(m - j - 1/2), s_j = sqrt(n - j - 1/2).  The eigenvector ratio
// recursion at Lambda = mu + lambda / (4 sqrt(n0)) is the action of the word
//
//   J_l M_l Jh_l Mh_l,   J_l  = Q(pi) A(s_l/p_l, mu/s_l),
//                        M_l  = A((1+X_l/p_l)^{-1}, lambda/(4 sqrt(n0) p_l)) A(p_l/p_{l+1}, 0),
//                        Jh_l = Q(pi) A(p_l/s_l, mu/p_l),
//                        Mh_l = A((1+Y_l/s_l)^{-1}, lambda/(4 sqrt(n0) s_l)),
//
// on the boundary of H, lifted to angles.  Lambda is an eigenvalue iff the
// forward phase (started at pi, i.e. r_0 = inf) and the target phase (started
// from 0 at the far end) agree modulo 2 pi, which gives exact eigenvalue counts.
//
// The regularized phase conjugates by T_l Q_{l-1}, T_l = A(1/Im rho_l, -Re rho_l),
// Q_l = rotation by arg(eta_l), eta_l = prod_{j<=l} rho_j^2 rhoh_j^2.  Its step is
// infinitesimal:  phi_{l+1} = phi_l * S_l^{Qh_l} Sh_l^{Q_l}  with
// S_l = M_l^{Th_l}, Sh_l = T_l^{-1} Mh_l T_{l+1}, Th_l = A(1/Im rhoh_l, -Re rhoh_l).

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "lagbulk/ensembles.hpp"
#include "lagbulk/hyperbolic.hpp"
#include "lagbulk/spectral.hpp"

namespace lagbulk::phase {

struct ConjugatedEntries {
  int n = 0;
  int m = 0;
  double beta = 0.0;
  std::vector<double> p;  // p_0 .. p_n
  std::vector<double> s;  // s_0 .. s_{n-1}
  std::vector<double> x;  // X_0 .. X_{n-1}
  std::vector<double> y;  // Y_0 .. Y_{n-1}; Y_{n-1} = 0 closes the recursion
};

ConjugatedEntries conjugated_entries(const BidiagonalLaguerre& b);

/// The conjugated 2n x 2n matrix (zero diagonal); lower[i] = A(i+1, i), upper[i] = A(i, i+1).
struct ConjugatedTridiagonal {
  std::vector<double> lower;
  std::vector<double> upper;
};
ConjugatedTridiagonal conjugated_matrix(const ConjugatedEntries& e);

/// rho_l, rhoh_l and eta_l for every l < n0 (unit complex numbers).
class Regularizers {
 public:
  explicit Regularizers(const ScalingParams& params);

  int size() const { return static_cast<int>(rho_.size()); }
  /// Throws ParameterError for l >= n0.
  std::complex<double> rho(int l) const;
  std::complex<double> rho_hat(int l) const;
  std::complex<double> eta(int l) const;
  /// Rotation angle of Q_l (arg eta_l); 0 for l = -1.
  double q_angle(int l) const;

 private:
  void check(int l) const;
  std::vector<std::complex<double>> rho_;
  std::vector<std::complex<double>> rho_hat_;
  std::vector<std::complex<double>> eta_;
};

inline Regularizers regularizers(const ScalingParams& params) { return Regularizers(params); }

/// Lifted phases on a lambda grid at step ell.
struct PhaseState {
  int ell = 0;
  std::vector<double> lambda_grid;
  std::vector<double> phi;         // forward phase
  std::vector<double> phi_target;  // target phase
  std::vector<double> alpha;       // phi(lambda) - phi(0)
};

struct SweepOptions {
  // Reject any half-step that moves an angle by pi or more.
  bool guard_steps = true;
};

using StepWord = std::array<hyperbolic::Generator, 7>;

/// J_l M_l Jh_l Mh_l at the given lambda.
StepWord raw_step_word(const ConjugatedEntries& e, const ScalingParams& params, int l, double lambda);

/// Forward raw phase after ell full steps (0 <= ell <= n), started at pi.
std::vector<double> raw_forward_phase(const ConjugatedEntries& e, const ScalingParams& params,
                                      std::span<const double> lambda_grid, int ell);
/// Target raw phase at ell, folded back from 0 at index n with inverse words.
std::vector<double> raw_target_phase(const ConjugatedEntries& e, const ScalingParams& params,
                                     std::span<const double> lambda_grid, int ell);

/// Un-regularized state at ell = n (target identically 0).
PhaseState raw_phase_sweep(const ConjugatedEntries& e, const ScalingParams& params,
                           std::span<const double> lambda_grid);

/// Regularized forward phase evolved to ell_stop < n0 with the infinitesimal step words.
PhaseState regularized_phase_sweep(const ConjugatedEntries& e, const ScalingParams& params,
                                   const Regularizers& regs, std::span<const double> lambda_grid,
                                   int ell_stop, SweepOptions options = {});

/// Regularized target phase at ell_stop < n0.
std::vector<double> target_phase_sweep(const ConjugatedEntries& e, const ScalingParams& params,
                                       const Regularizers& regs, std::span<const double> lambda_grid,
                                       int ell_stop);

/// phi * T_l Q_{l-1}: maps a raw phase at step l to the regularized frame.
double regularize(double phi, const Regularizers& regs, int l);

/// Forward and target phases together at ell: regularized for ell < n0, raw for ell = n.
PhaseState spliced_phase_state(const ConjugatedEntries& e, const ScalingParams& params,
                               const Regularizers& regs, std::span<const double> lambda_grid, int ell,
                               SweepOptions options = {});

/// #{ (phi - phi_target)(lambda0), (phi - phi_target)(lambda1) ] intersected with 2 pi Z.
/// Both lambdas must be grid points of the state.
int count_by_phase(const PhaseState& state, double lambda0, double lambda1);

}  // namespace lagbulk::phase
