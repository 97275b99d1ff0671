#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lagbulk/spectral.hpp"
#include "lagbulk/stats.hpp"

namespace lagbulk {

enum class ExperimentKind { bulk_compare, density, hermite_compare, phase_vs_sde, sine_beta };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::bulk_compare;
  double beta = 2.0;
  int n = 100;
  int m = 200;
  // Center: either c (mu = sqrt(c n)) or an explicit mu, not both.
  std::optional<double> c;
  std::optional<double> mu;
  double hermite_mu = 0.0;
  std::vector<double> lambda_grid;
  int replicas = 100;
  std::uint64_t seed = 0;
  double kappa_cutoff = 1.0;
  double epsilon = 0.5;
  double h = 1e-3;
  double delta = 1e-12;
  int threads = 1;
  bool timing = false;
  std::string out;
  std::string format = "json";
};

/// The default grid {-4pi, -2pi, 2pi, 4pi}.
std::vector<double> default_lambda_grid();

/// Validates the fields the given kind uses; throws ParameterError.
void validate(const ExperimentConfig& config);

/// mu from c or mu; c must lie strictly inside (a^2, b^2) for gamma = m/n.
double resolve_center(const ExperimentConfig& config);

/// Echo of every field that can influence a number in the report.  Threads,
/// timing and output settings are left out so reports stay byte-identical.
nlohmann::ordered_json config_echo(const ExperimentConfig& config);

struct SideMoments {
  std::string label;
  stats::Moments moments;
};

struct LambdaRow {
  double lambda = 0.0;
  std::vector<SideMoments> sides;
  std::optional<double> ks;
  std::optional<double> ks_p;
};

struct RawRow {
  std::uint64_t replica_id = 0;
  std::string source;
  std::optional<double> lambda;
  double value = 0.0;
};

struct Report {
  ExperimentKind kind = ExperimentKind::bulk_compare;
  nlohmann::ordered_json config;
  std::vector<LambdaRow> per_lambda;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<std::string> flags;
  std::string value_column = "count";
  std::vector<RawRow> raw;
  std::uint64_t seed = 0;
  std::optional<double> elapsed_s;

  const LambdaRow& row(double lambda) const;
  bool has_flag(const std::string& flag) const;
};

std::string report_json(const Report& report);
/// Raw samples as CSV: replica_id,source,lambda,<value column>.
std::string report_csv(const Report& report);

std::string version();

namespace experiments {

// Seed domains; each side of an experiment draws from its own derived seed.
inline constexpr std::uint64_t kLaguerreDomain = 1;
inline constexpr std::uint64_t kSineBetaDomain = 2;
inline constexpr std::uint64_t kHermiteDomain = 3;
inline constexpr std::uint64_t kPhaseDiffusionDomain = 4;

/// Eigenvalues of the doubled matrix inside the scaled window used for counting.
std::vector<double> window_eigenvalues(const SymTridiagonal& t, const ScalingParams& params,
                                       std::span<const double> lambda_grid);

/// Scaled gap between the two eigenvalues straddling center.
double central_gap(const SymTridiagonal& t, double center, double scale);

Report run_bulk_comparison(const ExperimentConfig& config);
Report run_density_check(const ExperimentConfig& config);
Report run_hermite_comparison(const ExperimentConfig& config);
Report run_phase_vs_sde(const ExperimentConfig& config);
Report run_sine_beta(const ExperimentConfig& config);

/// Dispatch on config.kind.
Report run(const ExperimentConfig& config);

}  // namespace experiments
}  // namespace lagbulk
