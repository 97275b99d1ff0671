#include "lagbulk/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lagbulk/errors.hpp"

namespace lagbulk::phase {

namespace {

using hyperbolic::Affine;
using hyperbolic::Generator;
using hyperbolic::Rotation;

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// T = A(1/Im z, -Re z) sends z to i.
Affine centering(std::complex<double> z) { return {1.0 / z.imag(), -z.real()}; }

double fold_inverse(const StepWord& word, double phi) {
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    phi = hyperbolic::apply_lifted(hyperbolic::inverse(*it), phi);
  }
  return phi;
}

double guarded(double before, double after, bool guard, int l) {
  if (guard && !(std::abs(after - before) < kPi)) {
    throw NumericalGuardError("step too large: regularized half-step " + std::to_string(l) +
                              " moved a phase by " + std::to_string(after - before));
  }
  return after;
}

std::size_t grid_index(const PhaseState& state, double lambda) {
  const auto it = std::find(state.lambda_grid.begin(), state.lambda_grid.end(), lambda);
  if (it == state.lambda_grid.end()) {
    throw ParameterError("lambda " + std::to_string(lambda) + " is not on the phase grid");
  }
  return static_cast<std::size_t>(it - state.lambda_grid.begin());
}

void check_entries(const ConjugatedEntries& e, const ScalingParams& params) {
  if (e.n != params.n || e.m != params.m) {
    throw ParameterError("conjugated entries and scaling parameters disagree on (n, m)");
  }
}

std::vector<double> with_alpha(const std::vector<double>& phi, double phi_at_zero) {
  std::vector<double> alpha(phi.size());
  std::transform(phi.begin(), phi.end(), alpha.begin(), [&](double v) { return v - phi_at_zero; });
  return alpha;
}

}  // namespace

ConjugatedEntries conjugated_entries(const BidiagonalLaguerre& b) {
  const int n = b.n;
  ConjugatedEntries e;
  e.n = n;
  e.m = b.m;
  e.beta = b.beta;
  e.p.resize(n + 1);
  e.s.resize(n);
  e.x.resize(n);
  e.y.assign(n, 0.0);
  for (int j = 0; j <= n; ++j) e.p[j] = std::sqrt(b.m - j - 0.5);
  for (int j = 0; j < n; ++j) e.s[j] = std::sqrt(n - j - 0.5);
  for (int l = 0; l < n; ++l) {
    e.x[l] = b.diag[l] * b.diag[l] / e.p[l + 1] - e.p[l];
    if (l + 1 < n) e.y[l] = b.subdiag[l] * b.subdiag[l] / e.s[l + 1] - e.s[l];
  }
  return e;
}

ConjugatedTridiagonal conjugated_matrix(const ConjugatedEntries& e) {
  ConjugatedTridiagonal t;
  const int n = e.n;
  t.lower.reserve(2 * n - 1);
  t.upper.reserve(2 * n - 1);
  for (int i = 0; i < n; ++i) {
    t.upper.push_back(e.p[i] + e.x[i]);
    t.lower.push_back(e.p[i + 1]);
    if (i + 1 < n) {
      t.upper.push_back(e.s[i] + e.y[i]);
      t.lower.push_back(e.s[i + 1]);
    }
  }
  return t;
}

Regularizers::Regularizers(const ScalingParams& params) {
  const int count = static_cast<int>(std::ceil(params.n0));
  rho_.reserve(count);
  rho_hat_.reserve(count);
  eta_.reserve(count);
  std::complex<double> eta(1.0, 0.0);
  for (int l = 0; l < count; ++l) {
    const double k = params.n0 - l;
    const std::complex<double> r(params.edge_side * std::sqrt(params.n1 / (params.n1 + k)),
                                 std::sqrt(k / (params.n1 + k)));
    const std::complex<double> rh(std::sqrt(params.m1 / (params.m1 + k)), std::sqrt(k / (params.m1 + k)));
    eta *= r * r * rh * rh;
    eta /= std::sqrt(std::norm(eta));  // modulus stays near 1, no overflow concern
    rho_.push_back(r);
    rho_hat_.push_back(rh);
    eta_.push_back(eta);
  }
}

void Regularizers::check(int l) const {
  if (l < 0 || l >= size()) {
    throw ParameterError("step " + std::to_string(l) + " is outside the bulk range l < n0");
  }
}

std::complex<double> Regularizers::rho(int l) const {
  check(l);
  return rho_[l];
}

std::complex<double> Regularizers::rho_hat(int l) const {
  check(l);
  return rho_hat_[l];
}

std::complex<double> Regularizers::eta(int l) const {
  check(l);
  return eta_[l];
}

double Regularizers::q_angle(int l) const {
  if (l == -1) return 0.0;
  return std::arg(eta(l));
}

StepWord raw_step_word(const ConjugatedEntries& e, const ScalingParams& params, int l, double lambda) {
  const double shift = lambda / params.scale();
  const double p = e.p[l];
  const double s = e.s[l];
  return {
      Rotation{kPi},                                   // J_l
      Affine{s / p, params.mu / s},
      Affine{1.0 / (1.0 + e.x[l] / p), shift / p},     // M_l
      Affine{p / e.p[l + 1], 0.0},
      Rotation{kPi},                                   // Jh_l
      Affine{p / s, params.mu / p},
      Affine{1.0 / (1.0 + e.y[l] / s), shift / s},     // Mh_l
  };
}

namespace {

double raw_step(const ConjugatedEntries& e, const ScalingParams& params, int l, double lambda, double phi) {
  const StepWord word = raw_step_word(e, params, l, lambda);
  return hyperbolic::apply_lifted(std::span<const Generator>(word), phi);
}

double raw_step_back(const ConjugatedEntries& e, const ScalingParams& params, int l, double lambda,
                     double phi) {
  return fold_inverse(raw_step_word(e, params, l, lambda), phi);
}

}  // namespace

std::vector<double> raw_forward_phase(const ConjugatedEntries& e, const ScalingParams& params,
                                      std::span<const double> lambda_grid, int ell) {
  check_entries(e, params);
  if (ell < 0 || ell > e.n) throw ParameterError("forward step index out of range");
  std::vector<double> out;
  out.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    double phi = kPi;
    for (int l = 0; l < ell; ++l) phi = raw_step(e, params, l, lambda, phi);
    out.push_back(phi);
  }
  return out;
}

std::vector<double> raw_target_phase(const ConjugatedEntries& e, const ScalingParams& params,
                                     std::span<const double> lambda_grid, int ell) {
  check_entries(e, params);
  if (ell < 0 || ell > e.n) throw ParameterError("target step index out of range");
  std::vector<double> out;
  out.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    double phi = 0.0;
    for (int l = e.n - 1; l >= ell; --l) phi = raw_step_back(e, params, l, lambda, phi);
    out.push_back(phi);
  }
  return out;
}

PhaseState raw_phase_sweep(const ConjugatedEntries& e, const ScalingParams& params,
                           std::span<const double> lambda_grid) {
  PhaseState state;
  state.ell = e.n;
  state.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  state.phi = raw_forward_phase(e, params, lambda_grid, e.n);
  state.phi_target.assign(lambda_grid.size(), 0.0);
  const double zero[] = {0.0};
  state.alpha = with_alpha(state.phi, raw_forward_phase(e, params, zero, e.n).front());
  return state;
}

double regularize(double phi, const Regularizers& regs, int l) {
  phi = hyperbolic::apply_lifted(centering(regs.rho(l)), phi);
  return phi + regs.q_angle(l - 1);
}

namespace {

double regularized_forward(const ConjugatedEntries& e, const ScalingParams& params, const Regularizers& regs,
                           double lambda, int ell_stop, bool guard) {
  const double shift = lambda / params.scale();
  double phi = kPi;
  for (int l = 0; l < ell_stop; ++l) {
    const double p = e.p[l];
    const double s = e.s[l];
    const std::complex<double> rh = regs.rho_hat(l);
    const double q = regs.q_angle(l);
    const double q_hat = std::arg(regs.eta(l) * std::conj(rh * rh));

    // First half-step: (M_l^{Th_l})^{Qh_l}.
    const Affine th = centering(rh);
    const std::array<Generator, 6> first = {
        Rotation{-q_hat}, hyperbolic::inverse(th), Affine{1.0 / (1.0 + e.x[l] / p), shift / p},
        Affine{p / e.p[l + 1], 0.0}, th, Rotation{q_hat},
    };
    phi = guarded(phi, hyperbolic::apply_lifted(std::span<const Generator>(first), phi), guard, l);

    // Second half-step: (T_l^{-1} Mh_l T_{l+1})^{Q_l}.
    const std::array<Generator, 5> second = {
        Rotation{-q}, hyperbolic::inverse(centering(regs.rho(l))),
        Affine{1.0 / (1.0 + e.y[l] / s), shift / s}, centering(regs.rho(l + 1)), Rotation{q},
    };
    phi = guarded(phi, hyperbolic::apply_lifted(std::span<const Generator>(second), phi), guard, l);
  }
  return phi;
}

void check_bulk_step(const ScalingParams& params, int ell_stop) {
  if (ell_stop < 0 || !(ell_stop < params.n0)) {
    throw ParameterError("regularized phases need 0 <= ell < n0");
  }
}

}  // namespace

PhaseState regularized_phase_sweep(const ConjugatedEntries& e, const ScalingParams& params,
                                   const Regularizers& regs, std::span<const double> lambda_grid,
                                   int ell_stop, SweepOptions options) {
  check_entries(e, params);
  check_bulk_step(params, ell_stop);
  PhaseState state;
  state.ell = ell_stop;
  state.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  state.phi.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    state.phi.push_back(regularized_forward(e, params, regs, lambda, ell_stop, options.guard_steps));
  }
  const double anchor = regularized_forward(e, params, regs, 0.0, ell_stop, options.guard_steps);
  state.alpha = with_alpha(state.phi, anchor);
  return state;
}

std::vector<double> target_phase_sweep(const ConjugatedEntries& e, const ScalingParams& params,
                                       const Regularizers& regs, std::span<const double> lambda_grid,
                                       int ell_stop) {
  check_bulk_step(params, ell_stop);
  auto target = raw_target_phase(e, params, lambda_grid, ell_stop);
  for (double& v : target) v = regularize(v, regs, ell_stop);
  return target;
}

PhaseState spliced_phase_state(const ConjugatedEntries& e, const ScalingParams& params,
                               const Regularizers& regs, std::span<const double> lambda_grid, int ell,
                               SweepOptions options) {
  if (ell < params.n0) {
    PhaseState state = regularized_phase_sweep(e, params, regs, lambda_grid, ell, options);
    state.phi_target = target_phase_sweep(e, params, regs, lambda_grid, ell);
    return state;
  }
  if (ell == e.n) return raw_phase_sweep(e, params, lambda_grid);
  PhaseState state;
  state.ell = ell;
  state.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  state.phi = raw_forward_phase(e, params, lambda_grid, ell);
  state.phi_target = raw_target_phase(e, params, lambda_grid, ell);
  const double zero[] = {0.0};
  state.alpha = with_alpha(state.phi, raw_forward_phase(e, params, zero, ell).front());
  return state;
}

int count_by_phase(const PhaseState& state, double lambda0, double lambda1) {
  if (lambda1 < lambda0) throw ParameterError("count_by_phase needs lambda0 <= lambda1");
  if (state.phi_target.size() != state.phi.size()) {
    throw ParameterError("phase state has no target phase");
  }
  const std::size_t i0 = grid_index(state, lambda0);
  const std::size_t i1 = grid_index(state, lambda1);
  const double d0 = state.phi[i0] - state.phi_target[i0];
  const double d1 = state.phi[i1] - state.phi_target[i1];
  return static_cast<int>(std::floor(d1 / kTwoPi) - std::floor(d0 / kTwoPi));
}

}  // namespace lagbulk::phase
