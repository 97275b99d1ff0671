#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include <json.hpp>

#include "lagbulk/errors.hpp"
#include "lagbulk/experiments.hpp"

using namespace lagbulk;
using json = nlohmann::json;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

ExperimentConfig base(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.n = 60;
  c.m = 120;
  c.c = 3.0;
  c.replicas = 12;
  c.seed = 99;
  c.lambda_grid = {-kTwoPi, 0.0, kTwoPi};
  c.delta = 1e-6;
  return c;
}

}  // namespace

TEST_CASE("kind names round-trip") {
  for (auto k : {ExperimentKind::bulk_compare, ExperimentKind::density, ExperimentKind::hermite_compare,
                 ExperimentKind::phase_vs_sde, ExperimentKind::sine_beta}) {
    CHECK(parse_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_kind("nope"), ParameterError);
}

TEST_CASE("center resolution and validation") {
  auto c = base(ExperimentKind::bulk_compare);
  CHECK(resolve_center(c) == doctest::Approx(std::sqrt(3.0 * 60)));
  c.mu = 10.0;
  CHECK_THROWS_AS(resolve_center(c), ParameterError);
  c.c.reset();
  CHECK(resolve_center(c) == 10.0);
  c.mu.reset();
  CHECK_THROWS_AS(resolve_center(c), ParameterError);
  c.c = 6.0;  // gamma = 2: support (0.17, 5.83)
  CHECK_THROWS_WITH_AS(resolve_center(c), doctest::Contains("Marchenko-Pastur support"), ParameterError);

  auto bad = base(ExperimentKind::bulk_compare);
  bad.m = bad.n;
  CHECK_THROWS_WITH_AS(experiments::run(bad), "m must exceed n", ParameterError);
  bad = base(ExperimentKind::bulk_compare);
  bad.lambda_grid = {1.0, -1.0};
  CHECK_THROWS_AS(experiments::run(bad), ParameterError);
  bad = base(ExperimentKind::phase_vs_sde);
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(experiments::run(bad), ParameterError);
  bad = base(ExperimentKind::hermite_compare);
  bad.hermite_mu = 100.0;
  CHECK_THROWS_AS(experiments::run(bad), ParameterError);
}

TEST_CASE("config echo leaves out scheduling and output settings") {
  auto c = base(ExperimentKind::bulk_compare);
  const auto echo = config_echo(c);
  CHECK(echo.contains("seed"));
  CHECK(echo.contains("beta"));
  CHECK_FALSE(echo.contains("threads"));
  CHECK_FALSE(echo.contains("out"));
  CHECK_FALSE(echo.contains("format"));
}

TEST_CASE("bulk comparison report") {
  auto c = base(ExperimentKind::bulk_compare);
  const auto report = experiments::run(c);
  const auto j = json::parse(report_json(report));
  CHECK(j["kind"] == "bulk-compare");
  REQUIRE(j["per_lambda"].size() == 3);
  for (const auto& row : j["per_lambda"]) {
    for (const char* key : {"lambda", "matrix", "sde", "ks", "ks_p"}) CHECK(row.contains(key));
    for (const char* key : {"mean", "var", "se", "n"}) CHECK(row["matrix"].contains(key));
  }
  // N(0) = 0 on both sides
  const auto& zero = report.row(0.0);
  for (const auto& side : zero.sides) {
    CHECK(side.moments.mean == 0.0);
    CHECK(side.moments.var == 0.0);
  }
  CHECK(j["meta"]["seed"] == 99);
  CHECK(j["meta"]["version"] == version());
  CHECK_FALSE(j["meta"].contains("elapsed_s"));
  CHECK(j["raw"]["columns"] == json::array({"replica_id", "source", "lambda", "count"}));
  CHECK(j["raw"]["rows"].size() == 2 * 12 * 3);

  const std::string csv = report_csv(report);
  CHECK(csv.rfind("replica_id,source,lambda,count\n", 0) == 0);

  c.timing = true;
  CHECK(json::parse(report_json(experiments::run(c)))["meta"].contains("elapsed_s"));
}

TEST_CASE("reports are deterministic and independent of the thread count") {
  for (auto kind : {ExperimentKind::bulk_compare, ExperimentKind::hermite_compare, ExperimentKind::sine_beta,
                    ExperimentKind::density}) {
    CAPTURE(to_string(kind));
    auto c = base(kind);
    const std::string one = report_json(experiments::run(c));
    CHECK(one == report_json(experiments::run(c)));
    c.threads = 3;
    CHECK(one == report_json(experiments::run(c)));
    c.seed = 100;
    CHECK(one != report_json(experiments::run(c)));
  }
}

TEST_CASE("phase comparison") {
  auto c = base(ExperimentKind::phase_vs_sde);
  c.n = 400;
  c.m = 800;
  c.replicas = 60;
  c.lambda_grid = {0.0, kTwoPi};
  const auto half = experiments::run(c);
  for (const auto& side : half.row(0.0).sides) {
    CHECK(side.moments.mean == 0.0);
    CHECK(side.moments.var == 0.0);
  }
  CHECK(half.value_column == "alpha");
  c.epsilon = 0.25;
  const auto quarter = experiments::run(c);
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(quarter.row(kTwoPi).sides[s].moments.var > half.row(kTwoPi).sides[s].moments.var);
  }
  CHECK(half.summary["t"] == 0.5);
  CHECK(half.summary["ell"] == static_cast<int>(std::floor(half.summary["n0"].get<double>() * 0.5)));
}

TEST_CASE("hermite comparison and the small-sample flag") {
  auto c = base(ExperimentKind::hermite_compare);
  c.replicas = 1;
  const auto one = experiments::run(c);
  CHECK(one.has_flag("insufficient-samples"));
  CHECK(one.summary["gap"].contains("ks"));
  CHECK(one.row(kTwoPi).sides[0].label == "laguerre");
  CHECK(one.row(kTwoPi).sides[1].label == "hermite");
  c.replicas = 20;
  CHECK_FALSE(experiments::run(c).has_flag("insufficient-samples"));
}

TEST_CASE("central gap") {
  const SymTridiagonal t{{1.0, 3.0, 7.0}, {1e-3, 1e-3}};
  CHECK(experiments::central_gap(t, 2.0, 1.0) == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(experiments::central_gap(t, 5.0, 10.0) == doctest::Approx(40.0).epsilon(1e-5));
  CHECK_THROWS_AS(experiments::central_gap(t, 8.0, 1.0), DomainError);
}

TEST_CASE("density check") {
  auto c = base(ExperimentKind::density);
  c.n = 100;
  c.m = 200;
  c.replicas = 5;
  const auto r = experiments::run(c);
  CHECK(r.summary["ks"].get<double>() < 0.05);
  CHECK(r.summary["mass_outside"].get<double>() < 0.01);
  CHECK(r.summary["samples"] == 500);
  CHECK(r.value_column == "eigenvalue");
  c.m = 101;  // gamma close to 1: support starts near 0
  const auto near_square = experiments::run(c);
  CHECK(near_square.summary["support"][0].get<double>() < 1e-4);
}
