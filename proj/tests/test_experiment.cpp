#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "optomech/experiment.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/io.hpp"


TEST_SUITE_BEGIN("experiment");
using namespace optomech;

namespace {

std::string csv_of(const RunRecord& rec) {
  std::ostringstream os;
  write_csv(os, rec);
  return os.str();
}

SweepConfig quick(Mode mode) {
  SweepConfig c = default_config(mode);
  c.numerics.grid_points = 160;
  c.numerics.refine = false;
  c.timing = false;
  return c;
}

}  // namespace

TEST_CASE("config round-trips through JSON") {
  for (Mode mode : {Mode::kPurity, Mode::kNonclassicality, Mode::kLosses, Mode::kState, Mode::kFeasibility}) {
    SweepConfig c = default_config(mode);
    c.output = "out.csv";
    c.numerics.grid_points = 300;
    c.feasibility.efficiency_factors = {0.5, 0.5};
    const std::string text = to_json(c).dump();
    const SweepConfig back = sweep_config_from_json(nlohmann::json::parse(text));
    CHECK(back == c);
    CHECK(to_json(back).dump() == text);
  }
}

TEST_CASE("config parsing") {
  const auto parse = [](const char* text) { return sweep_config_from_json(nlohmann::json::parse(text)); };
  const SweepConfig c = parse(R"({"mode": "losses", "eta": {"start": 0.1, "stop": 0.5, "num": 5}, "m": [1, 2]})");
  REQUIRE(c.eta.size() == 5);
  CHECK(c.eta[4] == doctest::Approx(0.5));
  CHECK(c.r == default_config(Mode::kLosses).r);
  CHECK_THROWS_AS(parse(R"({"mode": "losses", "colour": 1})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"eta": [0.1]})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"mode": "warp"})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"mode": "losses", "schema_version": 2})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"mode": "losses", "theta": "big"})"), ConfigError);

  SweepConfig bad = default_config(Mode::kLosses);
  bad.eta = {1.5};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = default_config(Mode::kLosses);
  bad.m = {4};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = default_config(Mode::kFeasibility);
  bad.feasibility.efficiency_factors = {5.0};
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("purity sweep") {
  SweepConfig c = default_config(Mode::kPurity);
  c.r = {0.5, 1.0};
  const RunRecord rec = run(c, 2);
  // 3 C values x 2 r + 2 contours + 2 working points.
  REQUIRE(rec.rows.size() == 10);
  CHECK(rec.rows[6]["kind"] == "contour");
  CHECK(rec.rows[6]["cooperativity"].get<double>() == doctest::Approx(200.0).epsilon(0.1));
  CHECK(rec.rows[7]["cooperativity"].get<double>() == doctest::Approx(1000.0).epsilon(0.1));
  CHECK(rec.rows[8]["kind"] == "working_point");
  CHECK(rec.rows[8]["n_eff"].get<double>() == doctest::Approx(0.02).epsilon(0.3));
  // Monotone in C at each r.
  CHECK(rec.rows[0]["n_eff"].get<double>() > rec.rows[2]["n_eff"].get<double>());
  CHECK(rec.rows[2]["n_eff"].get<double>() > rec.rows[4]["n_eff"].get<double>());

  SweepConfig tight = c;
  tight.kappa_over_gamma = 1e4;
  const RunRecord regime = run(tight, 1);
  CHECK(regime.rows[5]["status"].get<std::string>().rfind("regime", 0) == 0);  // C = 1000, r = 1
  CHECK(regime.rows[5]["n_eff"].is_null());
}

TEST_CASE("bisection for C") {
  const double c = cooperativity_for(0.5, 0.02, 2.0, 1e7);
  CHECK(c == doctest::Approx(200.0).epsilon(0.1));
  CHECK(purity_tradeoff(0.5, c, 2.0, 1e7) <= 0.02);
  CHECK(purity_tradeoff(0.5, c / 1.002, 2.0, 1e7) > 0.02);
  CHECK_THROWS_AS(cooperativity_for(3.0, 1e-4, 2.0, 1e7), ConvergenceError);
}

TEST_CASE("prepared states are converged and cross-checked") {
  NumericSettings s;
  const PreparedState p = prepare_state({1.0, 0.02, 0.1, 1.0, 3}, s);
  CHECK(p.fock_dim > 80);  // r = 1, m = 3 needs more than the default cutoff
  CHECK(p.result.state.converged());
  CHECK(p.fock_delta < 1e-6);
  s.max_fock_dim = 80;
  CHECK_THROWS_AS(prepare_state({1.0, 0.02, 0.1, 1.0, 3}, s), CutoffError);
}

TEST_CASE("sweeps are deterministic and agree across modes") {
  SweepConfig loss = quick(Mode::kLosses);
  loss.r = {0.5};
  loss.m = {1, 2};
  loss.eta = {0.2, 1.0};
  const RunRecord a = run(loss, 1);
  const RunRecord b = run(loss, 3);
  CHECK(csv_of(a) == csv_of(b));
  CHECK(to_json(a).dump() == to_json(b).dump());

  SweepConfig nc = quick(Mode::kNonclassicality);
  nc.r = {0.5};
  nc.n_eff = {0.02};
  nc.m = {1};
  nc.eta = {0.2};
  nc.theta = 0.05;
  const RunRecord c = run(nc, 1);
  REQUIRE(c.rows.size() == 1);
  REQUIRE(a.rows[0]["eta"].get<double>() == 0.2);
  for (const char* key : {"probability", "macroscopicity", "negativity", "mean_n"}) {
    CHECK(std::abs(c.rows[0][key].get<double>() - a.rows[0][key].get<double>()) < 1e-9);
  }

  // Re-running from the embedded config reproduces the record.
  const SweepConfig again = sweep_config_from_json(nlohmann::json::parse(to_json(a).dump()));
  CHECK(again == loss);
  CHECK(csv_of(run(again, 2)) == csv_of(a));
}

TEST_CASE("loss sweep flags the assumed angle and records impossible points") {
  SweepConfig loss = quick(Mode::kLosses);
  loss.r = {0.5};
  loss.m = {3};
  loss.eta = {0.0};
  const RunRecord rec = run(loss, 1);
  REQUIRE(rec.rows.size() == 1);
  CHECK(rec.rows[0]["theta_assumed"] == true);
  CHECK(rec.rows[0]["probability"].is_null());
  CHECK(rec.rows[0]["status"].get<std::string>().rfind("zero_probability", 0) == 0);
  CHECK(rec.assumptions.size() == 1);
  const std::string csv = csv_of(rec);
  CHECK(csv.rfind("r,m,theta,theta_assumed,eta,n_eff,probability,mean_n,macroscopicity,negativity,", 0) == 0);
  CHECK(csv.find("\n0.5,3,0.1,1,0,0.02,,,,,") != std::string::npos);
}

TEST_CASE("feasibility arithmetic") {
  const RunRecord rec = run(default_config(Mode::kFeasibility), 1);
  const auto value = [&](const std::string& q) {
    for (const auto& row : rec.rows)
      if (row["quantity"] == q) return row["value"].get<double>();
    FAIL("missing quantity " << q);
    return 0.0;
  };
  CHECK(value("eta") == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(value("squeezing_rate_over_2pi") == doctest::Approx(20e6).epsilon(1e-12));
  CHECK(value("theta") >= 0.05);
  CHECK(value("theta") <= 0.15);
  CHECK(value("n_th_from_t_bath") == doctest::Approx(1.545).epsilon(1e-3));
  CHECK(value("events_per_second") == doctest::Approx(value("herald_probability") / 10e-6));
  CHECK(bose_occupancy(1.0, 1e-20) < 1e-300);
}

TEST_CASE("state dump writes every artifact") {
  const auto dir = std::filesystem::temp_directory_path() / "phononsub_state_test";
  std::filesystem::remove_all(dir);
  SweepConfig c = quick(Mode::kState);
  c.r = {0.0};
  c.n_eff = {0.0};
  c.m = {0};
  c.theta = 0.0;
  c.dump_dir = dir.string();
  const RunRecord rec = run(c, 1);
  REQUIRE(rec.rows.size() == 1);
  CHECK(rec.rows[0]["status"] == "ok");
  const auto stem = dir / "state_r0_neff0_theta0_eta1_m0";
  const auto path = [&](const char* suffix) {
    auto p = stem;
    p += suffix;
    return p;
  };
  for (const char* suffix : {"_state.json", "_wigner.csv", "_wigner.bin", "_wigner.json", "_report.json"}) {
    CHECK(std::filesystem::exists(path(suffix)));
  }
  // Vacuum Gaussian on the dumped grid.
  const WignerGrid w = read_binary(path("_wigner"));
  const GridSpec& s = w.spec();
  for (int i = 0; i < s.nx; i += 13) {
    for (int j = 0; j < s.np; j += 11) {
      const double g = std::exp(-s.x(i) * s.x(i) - s.p(j) * s.p(j)) / std::numbers::pi;
      CHECK(std::abs(w(i, j) - g) < 1e-12);
    }
  }
  std::ifstream state(path("_state.json"));
  const DensityMatrix rho = density_matrix_from_json(nlohmann::json::parse(state));
  CHECK(rho.population(0) == doctest::Approx(1.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("record JSON carries provenance") {
  SweepConfig c = default_config(Mode::kPurity);
  c.r = {0.5};
  c.cooperativity = {200.0};
  const auto j = to_json(run(c, 1));
  CHECK(j["schema_version"] == 1);
  CHECK(j["config"]["mode"] == "purity");
  CHECK(j.contains("wall_clock_seconds"));
  CHECK(j["columns"].size() == 10);
  c.timing = false;
  CHECK_FALSE(to_json(run(c, 1)).contains("wall_clock_seconds"));
}

TEST_CASE("numbers are written with 12 significant digits") {
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(2e-7) == "2e-07");
  CHECK(format_number(1234567.891234567) == "1234567.89123");
}

TEST_SUITE_END();
