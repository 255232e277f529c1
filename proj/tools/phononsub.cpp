// phononsub: batch runs for phonon subtraction from squeezed thermal states.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "optomech/experiment.hpp"

using namespace optomech;

namespace {

// "a,b,c" or "start:stop:num".
std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string a, b, n;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, n, ':');
    try {
      const double start = std::stod(a);
      const double stop = std::stod(b);
      const int num = std::stoi(n);
      if (num < 1) throw ConfigError("range '" + text + "' needs at least one point");
      for (int i = 0; i < num; ++i) out.push_back(num == 1 ? start : start + (stop - start) * i / (num - 1));
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse range '" + text + "'");
    }
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse number '" + item + "'");
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_list(text)) {
    if (v != static_cast<int>(v)) throw ConfigError("'" + text + "' must contain integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

struct Flags {
  std::string config;
  std::string r, cooperativity, n_eff, n_eff_targets, eta, m, loss_theta;
  double theta = 0.0, n_th = 0.0, kappa_over_gamma = 0.0;
  int fock_dim = 0, max_fock_dim = 0, optical_dim = 0, grid_points = 0;
  std::string output, format, dump_state;
  bool no_refine = false, no_timing = false, strict = false;
  int threads = 0;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config (or a previous run record)");
  sub->add_option("--r", f.r, "squeezing values: list 'a,b' or range 'start:stop:num'");
  sub->add_option("--C,--cooperativity", f.cooperativity, "cooperativities");
  sub->add_option("--n-eff", f.n_eff, "initial occupancies");
  sub->add_option("--n-eff-targets", f.n_eff_targets, "purity targets for C(r) contours");
  sub->add_option("--eta", f.eta, "detection efficiencies");
  sub->add_option("--m", f.m, "click numbers");
  sub->add_option("--theta", f.theta, "beamsplitter angle");
  sub->add_option("--loss-theta", f.loss_theta, "loss-sweep angles for m=1,2,3");
  sub->add_option("--n-th", f.n_th, "mechanical bath occupancy");
  sub->add_option("--kappa-over-gamma", f.kappa_over_gamma, "kappa / gamma_m for the squeezing stage");
  sub->add_option("--fock-dim", f.fock_dim, "initial mechanical Fock cutoff");
  sub->add_option("--max-fock-dim", f.max_fock_dim, "largest cutoff the adaptive search may use");
  sub->add_option("--optical-dim", f.optical_dim, "optical Fock cutoff");
  sub->add_option("--grid-points", f.grid_points, "Wigner grid points per axis");
  sub->add_flag("--no-refine", f.no_refine, "skip the grid-refinement check");
  sub->add_option("-o,--output", f.output, "output file ('-' for stdout)");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--dump-state", f.dump_state, "directory for state JSON and Wigner dumps");
  sub->add_flag("--no-timing", f.no_timing, "omit wall-clock time from JSON records");
  sub->add_option("--threads", f.threads, "worker threads (default: all cores)");
  sub->add_flag("--strict", f.strict, "exit with status 3 if any point fails to converge");
}

SweepConfig build_config(Mode mode, const CLI::App* sub, const Flags& f) {
  SweepConfig cfg = default_config(mode);
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot open config " + f.config);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    cfg = sweep_config_from_json(doc);
    if (cfg.mode != mode) throw ConfigError("config mode '" + to_string(cfg.mode) + "' does not match subcommand");
  }
  const auto given = [&](const char* name) { return sub->count(name) > 0; };
  if (given("--r")) cfg.r = parse_list(f.r);
  if (given("--C")) cfg.cooperativity = parse_list(f.cooperativity);
  if (given("--n-eff")) cfg.n_eff = parse_list(f.n_eff);
  if (given("--n-eff-targets")) cfg.n_eff_targets = parse_list(f.n_eff_targets);
  if (given("--eta")) cfg.eta = parse_list(f.eta);
  if (given("--m")) cfg.m = parse_int_list(f.m);
  if (given("--theta")) cfg.theta = f.theta;
  if (given("--loss-theta")) cfg.loss_theta = parse_list(f.loss_theta);
  if (given("--n-th")) cfg.n_th = f.n_th;
  if (given("--kappa-over-gamma")) cfg.kappa_over_gamma = f.kappa_over_gamma;
  if (given("--fock-dim")) cfg.numerics.fock_dim = f.fock_dim;
  if (given("--max-fock-dim")) cfg.numerics.max_fock_dim = f.max_fock_dim;
  if (given("--optical-dim")) cfg.numerics.optical_dim = f.optical_dim;
  if (given("--grid-points")) cfg.numerics.grid_points = f.grid_points;
  if (f.no_refine) cfg.numerics.refine = false;
  if (given("--output")) cfg.output = f.output;
  if (given("--format")) cfg.format = f.format == "csv" ? OutputFormat::kCsv : OutputFormat::kJson;
  if (given("--dump-state")) cfg.dump_dir = f.dump_state;
  if (f.no_timing) cfg.timing = false;
  validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional phonon subtraction: purity, nonclassicality, loss and feasibility runs"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<Mode, std::string>> modes{
      {Mode::kPurity, "steady-state purity n_eff(r, C) and C(r) contours"},
      {Mode::kNonclassicality, "macroscopicity and negativity vs r for several n_eff and m"},
      {Mode::kLosses, "heralding probability and macroscopicity vs detection efficiency"},
      {Mode::kFeasibility, "device-level rates, angles and event budget"},
      {Mode::kState, "one heralded state with its Wigner grid and report"}};
  std::vector<std::pair<Mode, CLI::App*>> subs;
  for (const auto& [mode, help] : modes) {
    CLI::App* sub = app.add_subcommand(to_string(mode), help);
    add_flags(sub, flags);
    subs.emplace_back(mode, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (const auto& [mode, sub] : subs) {
    if (!sub->parsed()) continue;
    SweepConfig cfg;
    try {
      cfg = build_config(mode, sub, flags);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
    }
    try {
      const RunRecord record = run(cfg, flags.threads);
      write_record(record);
      if (record.nonconverged > 0) {
        std::cerr << record.nonconverged << " point(s) did not converge\n";
        if (flags.strict) return 3;
      }
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
    return 0;
  }
  return 2;
}
