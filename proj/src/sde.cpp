#include "lagbulk/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lagbulk/errors.hpp"
#include "lagbulk/parallel.hpp"

namespace lagbulk::sde {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxHalvings = 3;
constexpr double kResidualGate = 0.15;

bool is_sorted_grid(std::span<const double> grid) { return std::is_sorted(grid.begin(), grid.end()); }

// One Euler-Maruyama pass.  On the geometric grid dt = h s with s = 1 - t, so the
// drift increment is l h sqrt(s) / 2 and the noise increment has standard
// deviation sqrt(2h/beta) independently of t.  Returns false when a step exceeds pi.
bool integrate(const SineBetaConfig& config, double h, std::uint64_t replica, std::vector<double>& alpha) {
  RngStream stream(config.seed, replica);
  const std::size_t k = config.lambda_grid.size();
  alpha.assign(k, 0.0);
  const double noise = std::sqrt(2.0 * h / config.beta);
  double s = 1.0;
  while (s >= config.delta) {
    const double drift = 0.5 * h * std::sqrt(s);
    const double zr = stream.normal();
    const double zi = stream.normal();
    for (std::size_t i = 0; i < k; ++i) {
      const double a = alpha[i];
      const double step = config.lambda_grid[i] * drift + noise * ((std::cos(a) - 1.0) * zr + std::sin(a) * zi);
      if (!(std::abs(step) <= kPi)) return false;
      alpha[i] = a + step;
    }
    s -= h * s;
  }
  return true;
}

}  // namespace

void validate(const SineBetaConfig& config) {
  if (!(config.beta > 0.0) || !std::isfinite(config.beta)) throw ParameterError("beta must be positive");
  if (!(config.h > 0.0) || !(config.h < 1.0)) throw ParameterError("SDE step h must lie in (0, 1)");
  if (!(config.delta > 0.0) || !(config.delta < 1.0)) throw ParameterError("SDE cutoff delta must lie in (0, 1)");
  if (config.replicas < 1) throw ParameterError("replicas must be at least 1");
  if (config.lambda_grid.empty()) throw ParameterError("lambda grid is empty");
  if (!is_sorted_grid(config.lambda_grid)) throw ParameterError("lambda grid must be sorted ascending");
  for (double l : config.lambda_grid) {
    if (!std::isfinite(l)) throw ParameterError("lambda values must be finite");
  }
}

SineBetaReplica simulate_sine_beta_replica(const SineBetaConfig& config, std::uint64_t replica) {
  SineBetaReplica out;
  double h = config.h;
  bool ok = false;
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, h *= 0.5) {
    if (integrate(config, h, replica, out.alpha_end)) {
      ok = true;
      break;
    }
  }
  if (!ok) {
    throw NumericalGuardError("Sine_beta step too large in replica " + std::to_string(replica) +
                              " after halving h " + std::to_string(kMaxHalvings) + " times");
  }
  out.h_used = h;
  const std::size_t k = out.alpha_end.size();
  out.counts.resize(k);
  out.residual.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double turns = out.alpha_end[i] / kTwoPi;
    const double nearest = std::round(turns);
    out.counts[i] = static_cast<int>(nearest);
    out.residual[i] = std::abs(turns - nearest);
  }
  out.monotone = std::is_sorted(out.counts.begin(), out.counts.end());
  return out;
}

SineBetaResult simulate_sine_beta(const SineBetaConfig& config) {
  validate(config);
  SineBetaResult result;
  result.replicas.resize(config.replicas);
  parallel_for(result.replicas.size(), config.threads,
               [&](std::size_t r) { result.replicas[r] = simulate_sine_beta_replica(config, r); });
  double total = 0.0;
  std::size_t terms = 0;
  for (const auto& rep : result.replicas) {
    for (double v : rep.residual) total += v;
    terms += rep.residual.size();
    if (!rep.monotone) ++result.monotonicity_violations;
  }
  result.mean_residual = terms ? total / static_cast<double>(terms) : 0.0;
  result.residual_gate_passed = result.mean_residual < kResidualGate;
  return result;
}

std::vector<CountingSample> sine_beta_counting(const SineBetaConfig& config) {
  const SineBetaResult result = simulate_sine_beta(config);
  std::vector<CountingSample> out;
  out.reserve(result.replicas.size());
  for (std::size_t r = 0; r < result.replicas.size(); ++r) {
    CountingSample sample;
    sample.lambda_grid = config.lambda_grid;
    sample.counts = result.replicas[r].counts;
    sample.replica_id = r;
    sample.source = CountSource::sde;
    out.push_back(std::move(sample));
  }
  return out;
}

PhaseCoefficients phase_coefficients(const PhaseDiffusionParams& params, double t) {
  PhaseCoefficients c;
  const double e = params.edge_side;
  if (params.nu.is_infinite()) {
    c.rho = {e, 0.0};
  } else {
    const double nu = params.nu.value();
    c.rho = {e * std::sqrt((nu - 1.0) / (nu - t)), std::sqrt((1.0 - t) / (nu - t))};
    // d/dt Re rho = e sqrt(nu-1) / (2 (nu-t)^{3/2}); divided by Im rho.
    c.drift_rho = e * std::sqrt(nu - 1.0) / (2.0 * (nu - t) * std::sqrt(1.0 - t));
  }
  if (params.kappa.is_infinite()) {
    c.rho_hat = {1.0, 0.0};
  } else {
    const double kappa = params.kappa.value();
    c.rho_hat = {std::sqrt((kappa - 1.0) / (kappa - t)), std::sqrt((1.0 - t) / (kappa - t))};
    c.inv_p = 1.0 / std::sqrt(kappa - t);
  }
  return c;
}

PhaseDiffusionPath simulate_phase_diffusion(const PhaseDiffusionParams& params,
                                            std::span<const double> lambda_grid, double t_end, double h,
                                            RngStream& stream) {
  if (!(params.beta > 0.0)) throw ParameterError("beta must be positive");
  if (params.edge_side != 1 && params.edge_side != -1) throw ParameterError("edge side must be +1 or -1");
  if (!params.kappa.is_infinite() && !(params.kappa.value() >= 1.0)) throw ParameterError("kappa must be >= 1");
  if (!params.nu.is_infinite() && !(params.nu.value() >= 1.0)) throw ParameterError("nu must be >= 1");
  if (!(t_end >= 0.0) || !(t_end < 1.0)) throw ParameterError("phase diffusion needs 0 <= t_end < 1");
  if (!(h > 0.0) || !(h < 1.0)) throw ParameterError("step h must lie in (0, 1)");

  const std::size_t k = lambda_grid.size();
  const bool noisy = std::isfinite(params.beta);
  const double inv_sqrt_beta = noisy ? 1.0 / std::sqrt(params.beta) : 0.0;
  const double inv_beta = noisy ? 1.0 / params.beta : 0.0;

  PhaseDiffusionPath path;
  path.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
  std::vector<double> phi(k, kPi);

  // alpha is phi_l - phi_0 with phi_0 evolved alongside the grid.
  double phi_zero = kPi;
  auto push = [&](double t) {
    path.times.push_back(t);
    path.phi.push_back(phi);
    std::vector<double> alpha(k);
    for (std::size_t i = 0; i < k; ++i) alpha[i] = phi[i] - phi_zero;
    path.alpha.push_back(std::move(alpha));
  };

  double t = 0.0;
  push(t);
  while (t < t_end) {
    const double dt = std::min(h * (1.0 - t), t_end - t);
    const double sh = std::sqrt(1.0 - t);
    const PhaseCoefficients c = phase_coefficients(params, t);
    const std::complex<double> sq = c.rho * c.rho + c.rho_hat * c.rho_hat;
    const double base_drift =
        -c.drift_rho + sq.imag() * inv_beta / (2.0 * sh * sh) + c.rho_hat.real() * c.inv_p / (2.0 * sh);
    const double b_coef = std::sqrt(std::max(0.0, 2.0 + sq.real())) * inv_sqrt_beta / sh;
    const double w_coef = std::numbers::sqrt2 * inv_sqrt_beta / sh;
    const double root_dt = std::sqrt(dt);
    const double dw1 = root_dt * stream.normal();
    const double dw2 = root_dt * stream.normal();
    const double db = root_dt * stream.normal();

    auto advance = [&](double lambda, double value) {
      // Re(e^{-i phi} dW) = cos(phi) dW1 + sin(phi) dW2
      const double step = (lambda / (2.0 * sh) + base_drift) * dt +
                          w_coef * (std::cos(value) * dw1 + std::sin(value) * dw2) + b_coef * db;
      if (!(std::abs(step) < kPi)) {
        throw NumericalGuardError("phase diffusion step too large at t = " + std::to_string(t));
      }
      return value + step;
    };
    for (std::size_t i = 0; i < k; ++i) phi[i] = advance(lambda_grid[i], phi[i]);
    phi_zero = advance(0.0, phi_zero);
    t = dt == t_end - t ? t_end : t + dt;
    push(t);
  }
  return path;
}

PhaseDiffusionParams matched_phase_params(const ScalingParams& params) {
  PhaseDiffusionParams out;
  out.kappa = LimitRatio(params.m / params.n0);
  out.nu = LimitRatio(params.n / params.n0);
  out.edge_side = params.edge_side;
  out.beta = params.beta;
  return out;
}

}  // namespace lagbulk::sde
