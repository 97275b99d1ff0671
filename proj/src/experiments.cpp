#include "lagbulk/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "lagbulk/ensembles.hpp"
#include "lagbulk/errors.hpp"
#include "lagbulk/parallel.hpp"
#include "lagbulk/phase.hpp"
#include "lagbulk/sde.hpp"

#ifndef LAGBULK_VERSION
#define LAGBULK_VERSION "0.0.0"
#endif

namespace lagbulk {

namespace {

using json = nlohmann::ordered_json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMinSamples = 10;

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::bulk_compare, "bulk-compare"},
    {ExperimentKind::density, "density"},
    {ExperimentKind::hermite_compare, "hermite-compare"},
    {ExperimentKind::phase_vs_sde, "phase-vs-sde"},
    {ExperimentKind::sine_beta, "sine-beta"},
};

bool uses_laguerre(ExperimentKind k) { return k != ExperimentKind::sine_beta; }
bool uses_center(ExperimentKind k) {
  return k == ExperimentKind::bulk_compare || k == ExperimentKind::hermite_compare ||
         k == ExperimentKind::phase_vs_sde;
}
bool uses_grid(ExperimentKind k) { return k != ExperimentKind::density; }

json moments_json(const stats::Moments& m) {
  return json{{"mean", m.mean}, {"var", m.var}, {"se", m.se}, {"n", m.n}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Values of one grid column across replicas.
std::vector<double> column(const std::vector<CountingSample>& samples, std::size_t i) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.counts[i]);
  return out;
}

LambdaRow compare_row(double lambda, const std::string& left_label, const std::vector<double>& left,
                      const std::string& right_label, const std::vector<double>& right) {
  LambdaRow row;
  row.lambda = lambda;
  row.sides.push_back({left_label, stats::moments(left)});
  row.sides.push_back({right_label, stats::moments(right)});
  row.ks = stats::ks_two_sample(left, right);
  row.ks_p = stats::ks_p_value(*row.ks, left.size(), right.size());
  return row;
}

void append_counts(Report& report, const std::vector<CountingSample>& samples, const std::string& source) {
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < s.lambda_grid.size(); ++i) {
      report.raw.push_back({s.replica_id, source, s.lambda_grid[i], static_cast<double>(s.counts[i])});
    }
  }
}

void flag_small(Report& report, std::size_t left, std::size_t right) {
  if (std::min(left, right) < static_cast<std::size_t>(kMinSamples)) report.flags.push_back("insufficient-samples");
}

Report make_report(const ExperimentConfig& config) {
  Report r;
  r.kind = config.kind;
  r.config = config_echo(config);
  r.seed = config.seed;
  return r;
}

std::vector<double> window_points(const SymTridiagonal& t, double center, double scale,
                                  std::span<const double> lambda_grid) {
  const double lmin = std::min(0.0, *std::min_element(lambda_grid.begin(), lambda_grid.end()));
  const double lmax = std::max(0.0, *std::max_element(lambda_grid.begin(), lambda_grid.end()));
  const double margin = kTwoPi / scale;
  const double lo = center + lmin / scale - margin;
  const double hi = center + lmax / scale + margin;
  return spectral::eigenvalues(t, lo, hi, 1e-9 / scale);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  throw ParameterError("unknown experiment kind '" + name + "'");
}

std::vector<double> default_lambda_grid() { return {-2.0 * kTwoPi, -kTwoPi, kTwoPi, 2.0 * kTwoPi}; }

double resolve_center(const ExperimentConfig& config) {
  if (config.c && config.mu) throw ParameterError("give either c or mu as the center, not both");
  if (config.mu) {
    if (!(*config.mu > 0.0) || !std::isfinite(*config.mu)) throw ParameterError("mu must be positive");
    return *config.mu;
  }
  if (!config.c) throw ParameterError("a center is required: set c or mu");
  const double gamma = static_cast<double>(config.m) / config.n;
  const double a = std::sqrt(gamma) - 1.0;
  const double b = std::sqrt(gamma) + 1.0;
  if (!(*config.c > a * a && *config.c < b * b)) {
    throw ParameterError("c must lie inside the Marchenko-Pastur support (" + format_double(a * a) + ", " +
                         format_double(b * b) + ")");
  }
  return std::sqrt(*config.c * config.n);
}

void validate(const ExperimentConfig& config) {
  if (!(config.beta > 0.0) || !std::isfinite(config.beta)) throw ParameterError("beta must be positive");
  if (config.replicas < 1) throw ParameterError("replicas must be at least 1");
  if (config.threads < 0) throw ParameterError("threads must be >= 0 (0 = all cores)");
  if (config.format != "json" && config.format != "csv") throw ParameterError("format must be json or csv");
  if (uses_laguerre(config.kind)) {
    if (config.n < 1) throw ParameterError("n must be at least 1");
    if (config.m <= config.n) throw ParameterError("m must exceed n");
  }
  if (uses_center(config.kind)) {
    resolve_center(config);
    if (!(config.kappa_cutoff > 0.0)) throw ParameterError("kappa cutoff must be positive");
  }
  if (uses_grid(config.kind)) {
    if (config.lambda_grid.empty()) throw ParameterError("lambda grid is empty");
    if (!std::is_sorted(config.lambda_grid.begin(), config.lambda_grid.end())) {
      throw ParameterError("lambda grid must be sorted ascending");
    }
  }
  if (config.kind == ExperimentKind::bulk_compare || config.kind == ExperimentKind::sine_beta ||
      config.kind == ExperimentKind::phase_vs_sde) {
    if (!(config.h > 0.0 && config.h < 1.0)) throw ParameterError("SDE step h must lie in (0, 1)");
  }
  if (config.kind == ExperimentKind::bulk_compare || config.kind == ExperimentKind::sine_beta) {
    if (!(config.delta > 0.0 && config.delta < 1.0)) throw ParameterError("SDE cutoff delta must lie in (0, 1)");
  }
  if (config.kind == ExperimentKind::phase_vs_sde) {
    if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  }
  if (config.kind == ExperimentKind::hermite_compare) {
    if (!(std::abs(config.hermite_mu) < 2.0 * std::sqrt(static_cast<double>(config.n)))) {
      throw ParameterError("Hermite center outside bulk: need |hermite_mu| < 2 sqrt(n)");
    }
  }
}

json config_echo(const ExperimentConfig& config) {
  json j;
  j["kind"] = to_string(config.kind);
  j["beta"] = config.beta;
  if (config.kind != ExperimentKind::sine_beta) {
    j["n"] = config.n;
    j["m"] = config.m;
  }
  if (uses_center(config.kind)) {
    if (config.c) j["c"] = *config.c;
    if (config.mu) j["mu"] = *config.mu;
    j["kappa_cutoff"] = config.kappa_cutoff;
  }
  if (config.kind == ExperimentKind::hermite_compare) j["hermite_mu"] = config.hermite_mu;
  if (uses_grid(config.kind)) j["lambda"] = config.lambda_grid;
  j["replicas"] = config.replicas;
  j["seed"] = config.seed;
  if (config.kind == ExperimentKind::phase_vs_sde) j["epsilon"] = config.epsilon;
  if (config.kind == ExperimentKind::bulk_compare || config.kind == ExperimentKind::sine_beta ||
      config.kind == ExperimentKind::phase_vs_sde) {
    j["h"] = config.h;
  }
  if (config.kind == ExperimentKind::bulk_compare || config.kind == ExperimentKind::sine_beta) {
    j["delta"] = config.delta;
  }
  return j;
}

const LambdaRow& Report::row(double lambda) const {
  for (const auto& r : per_lambda) {
    if (r.lambda == lambda) return r;
  }
  throw ParameterError("no report row for lambda " + format_double(lambda));
}

bool Report::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

std::string report_json(const Report& report) {
  json j;
  j["kind"] = to_string(report.kind);
  j["config"] = report.config;
  json rows = json::array();
  for (const auto& r : report.per_lambda) {
    json row;
    row["lambda"] = r.lambda;
    for (const auto& side : r.sides) row[side.label] = moments_json(side.moments);
    if (r.ks) row["ks"] = *r.ks;
    if (r.ks_p) row["ks_p"] = *r.ks_p;
    rows.push_back(std::move(row));
  }
  j["per_lambda"] = std::move(rows);
  j["summary"] = report.summary;
  j["flags"] = report.flags;
  json raw_rows = json::array();
  for (const auto& r : report.raw) {
    raw_rows.push_back(json::array({r.replica_id, r.source, r.lambda ? json(*r.lambda) : json(nullptr), r.value}));
  }
  j["raw"] = json{{"columns", json::array({"replica_id", "source", "lambda", report.value_column})},
                  {"rows", std::move(raw_rows)}};
  json meta{{"seed", report.seed}, {"version", version()}};
  if (report.elapsed_s) meta["elapsed_s"] = *report.elapsed_s;
  j["meta"] = std::move(meta);
  return j.dump(2) + "\n";
}

std::string report_csv(const Report& report) {
  std::ostringstream os;
  os << "replica_id,source,lambda," << report.value_column << "\n";
  const bool integral = report.value_column == "count";
  for (const auto& r : report.raw) {
    os << r.replica_id << ',' << r.source << ',';
    if (r.lambda) os << format_double(*r.lambda);
    os << ',';
    if (integral) {
      os << static_cast<long long>(r.value);
    } else {
      os << format_double(r.value);
    }
    os << '\n';
  }
  return os.str();
}

std::string version() { return LAGBULK_VERSION; }

namespace experiments {

std::vector<double> window_eigenvalues(const SymTridiagonal& t, const ScalingParams& params,
                                       std::span<const double> lambda_grid) {
  return window_points(t, params.mu, params.scale(), lambda_grid);
}

double central_gap(const SymTridiagonal& t, double center, double scale) {
  const auto [glo, ghi] = spectral::gershgorin_bounds(t);
  double width = 2.0 * kTwoPi / scale;
  for (;;) {
    const double lo = std::max(glo, center - width);
    const double hi = std::min(ghi, center + width);
    const auto eig = spectral::eigenvalues(t, lo, hi, 1e-9 / scale);
    const auto above = std::upper_bound(eig.begin(), eig.end(), center);
    if (above != eig.begin() && above != eig.end()) return scale * (*above - *(above - 1));
    if (lo <= glo && hi >= ghi) throw DomainError("center has no eigenvalue on one side");
    width *= 2.0;
  }
}

Report run_bulk_comparison(const ExperimentConfig& config) {
  validate(config);
  const ScalingParams params =
      spectral::scaling_params(config.beta, config.n, config.m, resolve_center(config), config.kappa_cutoff);
  const auto& grid = config.lambda_grid;
  const auto replicas = static_cast<std::size_t>(config.replicas);

  std::vector<CountingSample> matrix(replicas);
  const std::uint64_t matrix_seed = derive_seed(config.seed, kLaguerreDomain);
  parallel_for(replicas, config.threads, [&](std::size_t r) {
    RngStream stream(matrix_seed, r);
    const auto t = ensembles::double_bidiagonal(ensembles::sample_laguerre(config.n, config.m, config.beta, stream));
    matrix[r] = spectral::counting_function(window_eigenvalues(t, params, grid), params, grid);
    matrix[r].replica_id = r;
  });

  SineBetaConfig sc;
  sc.beta = config.beta;
  sc.lambda_grid = grid;
  sc.h = config.h;
  sc.delta = config.delta;
  sc.replicas = config.replicas;
  sc.seed = derive_seed(config.seed, kSineBetaDomain);
  sc.threads = config.threads;
  const SineBetaResult sde_result = sde::simulate_sine_beta(sc);
  std::vector<CountingSample> sde_side(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    sde_side[r].lambda_grid = grid;
    sde_side[r].counts = sde_result.replicas[r].counts;
    sde_side[r].replica_id = r;
    sde_side[r].source = CountSource::sde;
  }

  Report report = make_report(config);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    report.per_lambda.push_back(compare_row(grid[i], "matrix", column(matrix, i), "sde", column(sde_side, i)));
  }
  report.summary = json{{"mu", params.mu},
                        {"n0", params.n0},
                        {"n1", params.n1},
                        {"m1", params.m1},
                        {"scale", params.scale()},
                        {"edge_side", params.edge_side},
                        {"sde_mean_residual", sde_result.mean_residual},
                        {"sde_monotonicity_violations", sde_result.monotonicity_violations}};
  if (!sde_result.residual_gate_passed) report.flags.push_back("sde-residual-gate");
  if (sde_result.monotonicity_violations > 0) report.flags.push_back("sde-monotonicity");
  flag_small(report, replicas, replicas);
  append_counts(report, matrix, "matrix");
  append_counts(report, sde_side, "sde");
  return report;
}

Report run_sine_beta(const ExperimentConfig& config) {
  validate(config);
  SineBetaConfig sc;
  sc.beta = config.beta;
  sc.lambda_grid = config.lambda_grid;
  sc.h = config.h;
  sc.delta = config.delta;
  sc.replicas = config.replicas;
  sc.seed = derive_seed(config.seed, kSineBetaDomain);
  sc.threads = config.threads;
  const SineBetaResult result = sde::simulate_sine_beta(sc);

  Report report = make_report(config);
  double h_min = config.h;
  for (const auto& rep : result.replicas) h_min = std::min(h_min, rep.h_used);
  for (std::size_t i = 0; i < sc.lambda_grid.size(); ++i) {
    std::vector<double> values;
    values.reserve(result.replicas.size());
    for (const auto& rep : result.replicas) values.push_back(rep.counts[i]);
    LambdaRow row;
    row.lambda = sc.lambda_grid[i];
    row.sides.push_back({"sde", stats::moments(values)});
    report.per_lambda.push_back(std::move(row));
  }
  report.summary = json{{"mean_residual", result.mean_residual},
                        {"residual_gate_passed", result.residual_gate_passed},
                        {"monotonicity_violations", result.monotonicity_violations},
                        {"smallest_h", h_min}};
  if (!result.residual_gate_passed) report.flags.push_back("sde-residual-gate");
  if (result.monotonicity_violations > 0) report.flags.push_back("sde-monotonicity");
  for (std::size_t r = 0; r < result.replicas.size(); ++r) {
    for (std::size_t i = 0; i < sc.lambda_grid.size(); ++i) {
      report.raw.push_back({r, "sde", sc.lambda_grid[i], static_cast<double>(result.replicas[r].counts[i])});
    }
  }
  return report;
}

Report run_density_check(const ExperimentConfig& config) {
  validate(config);
  const double gamma = static_cast<double>(config.m) / config.n;
  const auto replicas = static_cast<std::size_t>(config.replicas);
  std::vector<std::vector<double>> per_replica(replicas);
  const std::uint64_t seed = derive_seed(config.seed, kLaguerreDomain);
  parallel_for(replicas, config.threads, [&](std::size_t r) {
    RngStream stream(seed, r);
    const auto t = ensembles::double_bidiagonal(ensembles::sample_laguerre(config.n, config.m, config.beta, stream));
    const double ghi = spectral::gershgorin_bounds(t).second;
    auto sv = spectral::eigenvalues(t, 0.0, ghi, 1e-10 * ghi);
    for (double& v : sv) v = v * v / config.n;
    per_replica[r] = std::move(sv);
  });

  Report report = make_report(config);
  report.value_column = "eigenvalue";
  std::vector<double> pooled;
  for (std::size_t r = 0; r < replicas; ++r) {
    for (double v : per_replica[r]) {
      pooled.push_back(v);
      report.raw.push_back({r, "matrix", std::nullopt, v});
    }
  }
  const double a2 = std::pow(std::sqrt(gamma) - 1.0, 2);
  const double b2 = std::pow(std::sqrt(gamma) + 1.0, 2);
  const double ks = stats::ks_one_sample(pooled, [&](double x) { return spectral::mp_cdf(gamma, x); });
  const auto outside = std::count_if(pooled.begin(), pooled.end(),
                                     [&](double v) { return v < a2 - 0.1 || v > b2 + 0.1; });
  const double mass_outside = static_cast<double>(outside) / static_cast<double>(pooled.size());

  constexpr int kBins = 40;
  json edges = json::array(), empirical = json::array(), limit = json::array();
  const double width = (b2 - a2) / kBins;
  std::vector<double> hist(kBins, 0.0);
  for (double v : pooled) {
    const int bin = static_cast<int>(std::floor((v - a2) / width));
    if (bin >= 0 && bin < kBins) hist[bin] += 1.0;
  }
  for (int b = 0; b <= kBins; ++b) edges.push_back(a2 + b * width);
  for (int b = 0; b < kBins; ++b) {
    empirical.push_back(hist[b] / (static_cast<double>(pooled.size()) * width));
    limit.push_back(spectral::mp_density(gamma, a2 + (b + 0.5) * width));
  }
  report.summary = json{{"gamma", gamma},
                        {"support", json::array({a2, b2})},
                        {"samples", pooled.size()},
                        {"ks", ks},
                        {"ks_p", stats::ks_p_value(ks, pooled.size())},
                        {"mass_outside", mass_outside},
                        {"histogram", json{{"edges", edges}, {"density", empirical}, {"mp_density", limit}}}};
  if (mass_outside > 0.01) report.flags.push_back("mass-outside-support");
  if (pooled.size() < static_cast<std::size_t>(kMinSamples)) report.flags.push_back("insufficient-samples");
  return report;
}

Report run_hermite_comparison(const ExperimentConfig& config) {
  validate(config);
  const ScalingParams params =
      spectral::scaling_params(config.beta, config.n, config.m, resolve_center(config), config.kappa_cutoff);
  const double mu_h = config.hermite_mu;
  const double scale_h = std::sqrt(4.0 * config.n - mu_h * mu_h);
  const auto& grid = config.lambda_grid;
  const auto replicas = static_cast<std::size_t>(config.replicas);

  std::vector<CountingSample> lag(replicas), her(replicas);
  std::vector<double> lag_gap(replicas), her_gap(replicas);
  const std::uint64_t lag_seed = derive_seed(config.seed, kLaguerreDomain);
  const std::uint64_t her_seed = derive_seed(config.seed, kHermiteDomain);
  parallel_for(replicas, config.threads, [&](std::size_t r) {
    RngStream stream(lag_seed, r);
    const auto t = ensembles::double_bidiagonal(ensembles::sample_laguerre(config.n, config.m, config.beta, stream));
    lag[r] = spectral::counting_function(window_eigenvalues(t, params, grid), params, grid);
    lag[r].replica_id = r;
    lag_gap[r] = central_gap(t, params.mu, params.scale());
  });
  parallel_for(replicas, config.threads, [&](std::size_t r) {
    RngStream stream(her_seed, r);
    const auto t = ensembles::sample_hermite(config.n, config.beta, stream);
    her[r] = spectral::hermite_scaling(window_points(t, mu_h, scale_h, grid), config.n, mu_h, grid);
    her[r].replica_id = r;
    her_gap[r] = central_gap(t, mu_h, scale_h);
  });

  Report report = make_report(config);
  report.value_column = "value";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    report.per_lambda.push_back(compare_row(grid[i], "laguerre", column(lag, i), "hermite", column(her, i)));
  }
  const double gap_ks = stats::ks_two_sample(lag_gap, her_gap);
  report.summary = json{{"mu", params.mu},
                        {"n0", params.n0},
                        {"scale", params.scale()},
                        {"hermite_mu", mu_h},
                        {"hermite_scale", scale_h},
                        {"gap",
                         json{{"ks", gap_ks},
                              {"ks_p", stats::ks_p_value(gap_ks, replicas, replicas)},
                              {"laguerre", moments_json(stats::moments(lag_gap))},
                              {"hermite", moments_json(stats::moments(her_gap))}}}};
  flag_small(report, replicas, replicas);
  append_counts(report, lag, "laguerre");
  append_counts(report, her, "hermite");
  for (std::size_t r = 0; r < replicas; ++r) report.raw.push_back({r, "laguerre_gap", std::nullopt, lag_gap[r]});
  for (std::size_t r = 0; r < replicas; ++r) report.raw.push_back({r, "hermite_gap", std::nullopt, her_gap[r]});
  return report;
}

Report run_phase_vs_sde(const ExperimentConfig& config) {
  validate(config);
  const ScalingParams params =
      spectral::scaling_params(config.beta, config.n, config.m, resolve_center(config), config.kappa_cutoff);
  const phase::Regularizers regs(params);
  const int ell = static_cast<int>(std::floor(params.n0 * (1.0 - config.epsilon)));
  const double t_end = 1.0 - config.epsilon;
  const auto& grid = config.lambda_grid;
  const auto replicas = static_cast<std::size_t>(config.replicas);

  std::vector<std::vector<double>> matrix(replicas), sde_side(replicas);
  const std::uint64_t matrix_seed = derive_seed(config.seed, kLaguerreDomain);
  parallel_for(replicas, config.threads, [&](std::size_t r) {
    RngStream stream(matrix_seed, r);
    const auto b = ensembles::sample_laguerre(config.n, config.m, config.beta, stream);
    matrix[r] = phase::regularized_phase_sweep(phase::conjugated_entries(b), params, regs, grid, ell).alpha;
  });
  const PhaseDiffusionParams limit = sde::matched_phase_params(params);
  const std::uint64_t sde_seed = derive_seed(config.seed, kPhaseDiffusionDomain);
  parallel_for(replicas, config.threads, [&](std::size_t r) {
    RngStream stream(sde_seed, r);
    sde_side[r] = sde::simulate_phase_diffusion(limit, grid, t_end, config.h, stream).alpha.back();
  });

  Report report = make_report(config);
  report.value_column = "alpha";
  json expected = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> left(replicas), right(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
      left[r] = matrix[r][i];
      right[r] = sde_side[r][i];
    }
    report.per_lambda.push_back(compare_row(grid[i], "matrix", left, "sde", right));
    expected.push_back(grid[i] * (1.0 - std::sqrt(config.epsilon)));
  }
  report.summary = json{{"mu", params.mu},
                        {"n0", params.n0},
                        {"ell", ell},
                        {"t", t_end},
                        {"kappa", limit.kappa.value()},
                        {"nu", limit.nu.value()},
                        {"edge_side", params.edge_side},
                        {"expected_mean", expected}};
  flag_small(report, replicas, replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    for (std::size_t i = 0; i < grid.size(); ++i) report.raw.push_back({r, "matrix", grid[i], matrix[r][i]});
  }
  for (std::size_t r = 0; r < replicas; ++r) {
    for (std::size_t i = 0; i < grid.size(); ++i) report.raw.push_back({r, "sde", grid[i], sde_side[r][i]});
  }
  return report;
}

Report run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  switch (config.kind) {
    case ExperimentKind::bulk_compare:
      report = run_bulk_comparison(config);
      break;
    case ExperimentKind::density:
      report = run_density_check(config);
      break;
    case ExperimentKind::hermite_compare:
      report = run_hermite_comparison(config);
      break;
    case ExperimentKind::phase_vs_sde:
      report = run_phase_vs_sde(config);
      break;
    case ExperimentKind::sine_beta:
      report = run_sine_beta(config);
      break;
  }
  if (config.timing) {
    report.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

}  // namespace experiments
}  // namespace lagbulk
