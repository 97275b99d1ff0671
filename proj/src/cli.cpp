#include "lagbulk/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lagbulk/errors.hpp"
#include "lagbulk/experiments.hpp"
#include "lagbulk/rng.hpp"
#include "lagbulk/spectral.hpp"

namespace lagbulk::cli {

namespace {

using json = nlohmann::json;

// Flags shared by the sampling subcommands (sample, eig).
struct SampleOptions {
  std::string ensemble = "laguerre";
  std::string matrix;
  std::uint64_t replica = 0;
  double lo = 0.0;
  double hi = 0.0;
  double tol = 0.0;
  int precision = 12;
};

struct Invocation {
  ExperimentConfig config;
  SampleOptions sample;
  std::string config_file;
  CLI::App* sub = nullptr;
};

std::string format_number(double v, int precision) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string flag_name(const std::string& key) {
  std::string name = key;
  std::replace(name.begin(), name.end(), '_', '-');
  return "--" + name;
}

bool given(CLI::App* sub, const std::string& key) {
  const std::string name = flag_name(key);
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->check_lname(name.substr(2))) return opt->count() > 0;
  }
  return false;
}

// Fills every config field the command line left unset from a JSON file.
void apply_config_file(Invocation& inv) {
  std::ifstream in(inv.config_file);
  if (!in) throw ParameterError("cannot open config file '" + inv.config_file + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError("config file '" + inv.config_file + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ParameterError("config file must hold a JSON object");

  auto& c = inv.config;
  auto& s = inv.sample;
  using Setter = std::function<void(const json&)>;
  const std::map<std::string, Setter> setters = {
      {"beta", [&](const json& v) { c.beta = v.get<double>(); }},
      {"n", [&](const json& v) { c.n = v.get<int>(); }},
      {"m", [&](const json& v) { c.m = v.get<int>(); }},
      {"c", [&](const json& v) { c.c = v.get<double>(); }},
      {"mu", [&](const json& v) { c.mu = v.get<double>(); }},
      {"hermite_mu", [&](const json& v) { c.hermite_mu = v.get<double>(); }},
      {"lambda", [&](const json& v) { c.lambda_grid = v.get<std::vector<double>>(); }},
      {"replicas", [&](const json& v) { c.replicas = v.get<int>(); }},
      {"seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); }},
      {"kappa_cutoff", [&](const json& v) { c.kappa_cutoff = v.get<double>(); }},
      {"epsilon", [&](const json& v) { c.epsilon = v.get<double>(); }},
      {"h", [&](const json& v) { c.h = v.get<double>(); }},
      {"delta", [&](const json& v) { c.delta = v.get<double>(); }},
      {"threads", [&](const json& v) { c.threads = v.get<int>(); }},
      {"timing", [&](const json& v) { c.timing = v.get<bool>(); }},
      {"out", [&](const json& v) { c.out = v.get<std::string>(); }},
      {"format", [&](const json& v) { c.format = v.get<std::string>(); }},
      {"ensemble", [&](const json& v) { s.ensemble = v.get<std::string>(); }},
      {"matrix", [&](const json& v) { s.matrix = v.get<std::string>(); }},
      {"replica", [&](const json& v) { s.replica = v.get<std::uint64_t>(); }},
      {"tol", [&](const json& v) { s.tol = v.get<double>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") continue;
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParameterError("unknown config key '" + key + "'");
    if (given(inv.sub, key)) continue;
    try {
      it->second(value);
    } catch (const json::exception&) {
      throw ParameterError("config key '" + key + "' has the wrong type");
    }
  }
}

void add_common(CLI::App* sub, Invocation& inv) {
  sub->add_option("--config", inv.config_file, "JSON file with default flag values (flags win)");
  sub->add_option("--out", inv.config.out, "write results to this file instead of standard output");
  sub->add_option("--format", inv.config.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--seed", inv.config.seed, "random seed");
  sub->add_option("--threads", inv.config.threads, "worker threads (0 = all cores)");
  sub->add_flag("--timing", inv.config.timing, "record wall-clock time in the report");
}

void add_matrix_flags(CLI::App* sub, Invocation& inv) {
  sub->add_option("--beta", inv.config.beta, "ensemble parameter beta");
  sub->add_option("--n", inv.config.n, "matrix size n");
  sub->add_option("--m", inv.config.m, "Laguerre parameter m (> n)");
}

void add_experiment_flags(CLI::App* sub, Invocation& inv) {
  add_matrix_flags(sub, inv);
  sub->add_option("--c", inv.config.c, "center as mu = sqrt(c n), c inside the Marchenko-Pastur support");
  sub->add_option("--mu", inv.config.mu, "explicit center mu");
  sub->add_option("--lambda", inv.config.lambda_grid, "lambda grid (repeat or comma-separate)")->delimiter(',');
  sub->add_option("--replicas", inv.config.replicas, "Monte-Carlo replicas per side");
  sub->add_option("--kappa-cutoff", inv.config.kappa_cutoff, "bulk cutoff constant K");
  sub->add_option("--h", inv.config.h, "SDE base step");
}

std::string sample_text(const SymTridiagonal& t) {
  std::ostringstream os;
  write_matrix(os, t);
  return os.str();
}

SymTridiagonal sampled_matrix(const Invocation& inv) {
  const auto& c = inv.config;
  RngStream stream(c.seed, inv.sample.replica);
  if (inv.sample.ensemble == "laguerre") {
    if (c.m <= c.n) throw ParameterError("m must exceed n");
    return ensembles::double_bidiagonal(ensembles::sample_laguerre(c.n, c.m, c.beta, stream));
  }
  if (inv.sample.ensemble == "hermite") return ensembles::sample_hermite(c.n, c.beta, stream);
  throw ParameterError("ensemble must be laguerre or hermite");
}

// Text output unless --format json was asked for explicitly.
bool json_requested(const Invocation& inv) {
  return inv.config.format == "json" && inv.sub->get_option("--format")->count() > 0;
}

std::string run_sample(const Invocation& inv) {
  const auto& c = inv.config;
  if (c.format == "csv") throw ParameterError("sample writes the matrix file format or json");
  if (!json_requested(inv)) return sample_text(sampled_matrix(inv));
  if (inv.sample.ensemble == "laguerre") {
    if (c.m <= c.n) throw ParameterError("m must exceed n");
    RngStream stream(c.seed, inv.sample.replica);
    const auto b = ensembles::sample_laguerre(c.n, c.m, c.beta, stream);
    json j{{"ensemble", "laguerre"}, {"n", b.n},       {"m", b.m},          {"beta", b.beta},
           {"seed", c.seed},         {"replica", inv.sample.replica}, {"diag", b.diag}, {"subdiag", b.subdiag}};
    return j.dump(2) + "\n";
  }
  const SymTridiagonal t = sampled_matrix(inv);
  json j{{"ensemble", "hermite"}, {"n", c.n}, {"beta", c.beta}, {"seed", c.seed},
         {"replica", inv.sample.replica}, {"diag", t.diag}, {"offdiag", t.offdiag}};
  return j.dump(2) + "\n";
}

std::string run_eig(const Invocation& inv) {
  const SymTridiagonal t = inv.sample.matrix.empty() ? sampled_matrix(inv) : read_matrix_file(inv.sample.matrix);
  const auto [glo, ghi] = spectral::gershgorin_bounds(t);
  const bool windowed = inv.sub->get_option("--lo")->count() > 0 || inv.sub->get_option("--hi")->count() > 0;
  const double lo = inv.sub->get_option("--lo")->count() > 0 ? inv.sample.lo : glo;
  const double hi = inv.sub->get_option("--hi")->count() > 0 ? inv.sample.hi : ghi;
  if (windowed && !(lo < hi)) throw ParameterError("--lo must be below --hi");
  const double tol =
      inv.sample.tol > 0.0 ? inv.sample.tol : 1e-14 * std::max({1.0, std::abs(glo), std::abs(ghi)});
  const auto eig = spectral::eigenvalues(t, lo, hi, tol);
  if (json_requested(inv)) return json(eig).dump() + "\n";
  std::string out;
  for (double v : eig) out += format_number(v, inv.sample.precision) + "\n";
  return out;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ParameterError("cannot write output file '" + path + "'");
  file << text;
  if (!file) throw ParameterError("failed writing output file '" + path + "'");
}

}  // namespace

SymTridiagonal read_matrix(std::istream& in) {
  long long k = 0;
  if (!(in >> k) || k < 1) throw ParameterError("matrix file: first line must hold the size k >= 1");
  SymTridiagonal t;
  t.diag.resize(k);
  t.offdiag.resize(k - 1);
  for (auto& v : t.diag) {
    if (!(in >> v)) throw ParameterError("matrix file: expected " + std::to_string(k) + " diagonal entries");
  }
  for (auto& v : t.offdiag) {
    if (!(in >> v)) throw ParameterError("matrix file: expected " + std::to_string(k - 1) + " off-diagonal entries");
  }
  std::string extra;
  if (in >> extra) throw ParameterError("matrix file: unexpected trailing content '" + extra + "'");
  return t;
}

SymTridiagonal read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open matrix file '" + path + "'");
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const SymTridiagonal& t) {
  out << t.diag.size() << "\n";
  for (std::size_t i = 0; i < t.diag.size(); ++i) out << (i ? " " : "") << format_number(t.diag[i], 17);
  out << "\n";
  for (std::size_t i = 0; i < t.offdiag.size(); ++i) out << (i ? " " : "") << format_number(t.offdiag[i], 17);
  out << "\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bulk spectra of beta-Laguerre matrices and the Sine_beta process", "lagbulk"};
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", "lagbulk " + version());
  app.require_subcommand(1);

  Invocation inv;
  inv.config.lambda_grid.clear();

  auto* sample = app.add_subcommand("sample", "emit a sampled tridiagonal matrix");
  auto* eig = app.add_subcommand("eig", "eigenvalues of a sampled or file-given tridiagonal matrix");
  for (auto* sub : {sample, eig}) {
    add_common(sub, inv);
    add_matrix_flags(sub, inv);
    sub->add_option("--ensemble", inv.sample.ensemble, "laguerre (doubled) or hermite")
        ->check(CLI::IsMember({"laguerre", "hermite"}));
    sub->add_option("--replica", inv.sample.replica, "stream id of the sample");
  }
  eig->add_option("--matrix", inv.sample.matrix, "matrix file: k, then k diagonal and k-1 off-diagonal entries");
  eig->add_option("--lo", inv.sample.lo, "window lower end (exclusive)");
  eig->add_option("--hi", inv.sample.hi, "window upper end (inclusive)");
  eig->add_option("--tol", inv.sample.tol, "bisection width");
  eig->add_option("--precision", inv.sample.precision, "significant digits in text output")
      ->check(CLI::Range(1, 17));

  struct ExperimentCommand {
    const char* name;
    ExperimentKind kind;
    const char* help;
  };
  const ExperimentCommand commands[] = {
      {"density", ExperimentKind::density, "empirical spectrum of AA^T/n vs Marchenko-Pastur"},
      {"bulk-count", ExperimentKind::bulk_compare, "bulk counting functions: matrix vs Sine_beta SDE"},
      {"sine-beta", ExperimentKind::sine_beta, "counting functions of the Sine_beta SDE"},
      {"phase", ExperimentKind::phase_vs_sde, "relative phase vs the limiting phase diffusion"},
      {"hermite-compare", ExperimentKind::hermite_compare, "central gaps: Laguerre vs Hermite bulk"},
  };
  std::map<CLI::App*, ExperimentKind> kinds;
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub, inv);
    add_experiment_flags(sub, inv);
    kinds[sub] = cmd.kind;
    if (cmd.kind == ExperimentKind::sine_beta || cmd.kind == ExperimentKind::bulk_compare) {
      sub->add_option("--delta", inv.config.delta, "SDE terminal cutoff 1 - t_end");
    }
    if (cmd.kind == ExperimentKind::phase_vs_sde) {
      sub->add_option("--epsilon", inv.config.epsilon, "checkpoint t = 1 - epsilon");
    }
    if (cmd.kind == ExperimentKind::hermite_compare) {
      sub->add_option("--hermite-mu", inv.config.hermite_mu, "Hermite-side center");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParameterFailure;
  }

  try {
    inv.sub = app.get_subcommands().front();
    if (!inv.config_file.empty()) apply_config_file(inv);

    if (inv.sub == sample) {
      emit(run_sample(inv), inv.config.out, out);
      return kOk;
    }
    if (inv.sub == eig) {
      emit(run_eig(inv), inv.config.out, out);
      return kOk;
    }
    ExperimentConfig& config = inv.config;
    config.kind = kinds.at(inv.sub);
    if (config.lambda_grid.empty()) {
      config.lambda_grid = config.kind == ExperimentKind::phase_vs_sde
                               ? std::vector<double>{0.0, 2.0 * std::numbers::pi}
                               : default_lambda_grid();
    }
    std::sort(config.lambda_grid.begin(), config.lambda_grid.end());
    validate(config);
    const Report report = experiments::run(config);
    emit(config.format == "csv" ? report_csv(report) : report_json(report), config.out, out);
    return kOk;
  } catch (const NumericalGuardError& e) {
    err << "lagbulk: numerical guard: " << e.what() << "\n";
    return kGuardFailure;
  } catch (const ParameterError& e) {
    err << "lagbulk: " << e.what() << "\n";
    return kParameterFailure;
  } catch (const DomainError& e) {
    err << "lagbulk: " << e.what() << "\n";
    return kParameterFailure;
  } catch (const std::exception& e) {
    err << "lagbulk: " << e.what() << "\n";
    return kParameterFailure;
  }
}

}  // namespace lagbulk::cli
