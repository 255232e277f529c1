#include "optomech/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <thread>

#include "optomech/io.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::vector<double> linspace(double start, double stop, int num) {
  if (num < 1) throw ConfigError("linspace needs num >= 1");
  std::vector<double> out(num);
  for (int i = 0; i < num; ++i) out[i] = num == 1 ? start : start + (stop - start) * i / (num - 1);
  return out;
}

template <typename T>
std::vector<T> list_from_json(const json& j, const std::string& key) {
  if (j.is_object()) {
    if constexpr (std::is_same_v<T, double>) {
      return linspace(j.at("start").get<double>(), j.at("stop").get<double>(), j.at("num").get<int>());
    }
    throw ConfigError("'" + key + "' must be an array");
  }
  if (j.is_number()) return {j.get<T>()};
  if (!j.is_array()) throw ConfigError("'" + key + "' must be an array");
  return j.get<std::vector<T>>();
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

// Runs body(i) for i in [0, n) on a small pool; results are written by index
// so the emitted order never depends on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  unsigned count = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  count = static_cast<unsigned>(std::min<std::size_t>(count, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  if (count <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

struct PointOutcome {
  ordered_json values = ordered_json::object();
  std::string status = "ok";
  bool nonconverged = false;
};

// Maps an exception to a status string and flags numerical failures.
void classify(PointOutcome& out, std::exception_ptr ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const ZeroProbabilityError& e) {
    out.status = std::string("zero_probability: ") + e.what();
  } catch (const RegimeError& e) {
    out.status = std::string("regime: ") + e.what();
  } catch (const InstabilityError& e) {
    out.status = std::string("unstable: ") + e.what();
  } catch (const ConvergenceError& e) {
    out.status = std::string("nonconverged: ") + e.what();
    out.nonconverged = true;
  } catch (const CutoffError& e) {
    out.status = std::string("nonconverged: ") + e.what();
    out.nonconverged = true;
  } catch (const GridError& e) {
    out.status = std::string("nonconverged: ") + e.what();
    out.nonconverged = true;
  } catch (const std::exception& e) {
    out.status = std::string("error: ") + e.what();
  }
}

std::string csv_cell(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c == '\n' ? ' ' : c;
  }
  return quoted + "\"";
}

std::string point_stem(const std::string& prefix, const PointSpec& p) {
  return prefix + "_r" + format_number(p.r) + "_neff" + format_number(p.n_eff) + "_theta" + format_number(p.theta) +
         "_eta" + format_number(p.eta) + "_m" + std::to_string(p.m);
}

// Heralded state, its report, and optional dumps for one point.
PointOutcome evaluate_point(const PointSpec& p, const NumericSettings& settings, const std::string& dump_dir,
                            const std::string& dump_prefix, bool dump) {
  PointOutcome out;
  auto& v = out.values;
  for (const char* key : {"probability", "mean_n", "macroscopicity", "negativity", "macroscopicity_delta",
                          "negativity_delta", "fock_dim", "fock_delta"}) {
    v[key] = nullptr;
  }
  try {
    const PreparedState prepared = prepare_state(p, settings);
    v["probability"] = prepared.result.probability;
    v["fock_dim"] = prepared.fock_dim;
    v["fock_delta"] = prepared.fock_delta;
    ReportOptions options;
    options.points = settings.grid_points;
    options.refine = settings.refine;
    const NonclassicalityReport rep = report(prepared.result.state, options);
    v["mean_n"] = rep.mean_n;
    v["macroscopicity"] = rep.macroscopicity;
    v["negativity"] = rep.negativity;
    v["macroscopicity_delta"] = settings.refine ? ordered_json(rep.macroscopicity_delta) : ordered_json(nullptr);
    v["negativity_delta"] = settings.refine ? ordered_json(rep.negativity_delta) : ordered_json(nullptr);
    if (dump && !dump_dir.empty()) {
      const std::filesystem::path dir(dump_dir);
      std::filesystem::create_directories(dir);
      const std::filesystem::path stem = dir / point_stem(dump_prefix, p);
      std::filesystem::path state_path = stem;
      state_path += "_state.json";
      std::ofstream(state_path) << to_json(prepared.result.state).dump() << '\n';
      GridSpec spec = rep.grid;
      spec.nx = spec.np = settings.grid_points;
      const WignerGrid grid = wigner(prepared.result.state, spec);
      std::filesystem::path csv_path = stem;
      csv_path += "_wigner.csv";
      std::ofstream csv(csv_path);
      write_csv(csv, grid);
      std::filesystem::path bin_stem = stem;
      bin_stem += "_wigner";
      write_binary(bin_stem, grid);
      std::filesystem::path report_path = stem;
      report_path += "_report.json";
      ordered_json r;
      r["schema_version"] = 1;
      r["macroscopicity"] = rep.macroscopicity;
      r["negativity"] = rep.negativity;
      r["mean_n"] = rep.mean_n;
      r["macroscopicity_delta"] = rep.macroscopicity_delta;
      r["negativity_delta"] = rep.negativity_delta;
      r["grid"] = to_json(rep.grid);
      std::ofstream(report_path) << r.dump(2) << '\n';
    }
  } catch (...) {
    classify(out, std::current_exception());
  }
  return out;
}

RunRecord finish(RunRecord record, std::vector<PointOutcome>&& outcomes,
                 std::vector<ordered_json>&& keys) {
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ordered_json row = std::move(keys[i]);
    for (auto& [k, val] : outcomes[i].values.items()) row[k] = val;
    row["status"] = outcomes[i].status;
    if (outcomes[i].nonconverged) ++record.nonconverged;
    record.rows.push_back(std::move(row));
  }
  return record;
}

const std::vector<std::string> kMeasureColumns{"probability",      "mean_n",   "macroscopicity",
                                               "negativity",       "macroscopicity_delta",
                                               "negativity_delta", "fock_dim", "fock_delta",
                                               "status"};

void check_range(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kPurity: return "purity";
    case Mode::kNonclassicality: return "nonclassicality";
    case Mode::kLosses: return "losses";
    case Mode::kState: return "state";
    case Mode::kFeasibility: return "feasibility";
  }
  return "state";
}

Mode mode_from_string(const std::string& name) {
  for (Mode m : {Mode::kPurity, Mode::kNonclassicality, Mode::kLosses, Mode::kState, Mode::kFeasibility}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown mode '" + name + "'");
}

SweepConfig default_config(Mode mode) {
  SweepConfig c;
  c.mode = mode;
  switch (mode) {
    case Mode::kPurity:
      c.r = linspace(0.0, 1.5, 31);
      c.cooperativity = {50.0, 200.0, 1000.0};
      c.n_eff_targets = {0.02};
      break;
    case Mode::kNonclassicality:
      c.r = linspace(0.1, 1.1, 6);
      c.n_eff = {0.0, 0.02, 0.1};
      c.m = {1, 2, 3};
      c.eta = {1.0};
      c.theta = 0.1;
      break;
    case Mode::kLosses:
      c.r = {0.5, 1.0};
      c.n_eff = {0.02};
      c.m = {1, 2, 3};
      c.eta = linspace(0.1, 1.0, 10);
      break;
    case Mode::kState:
      c.r = {1.0};
      c.n_eff = {0.02};
      c.m = {2};
      c.eta = {1.0};
      c.theta = 0.1;
      c.dump_dir = ".";
      break;
    case Mode::kFeasibility:
      c.r = {0.5};
      c.n_eff = {0.02};
      c.m = {1};
      break;
  }
  return c;
}

void validate(const SweepConfig& c) {
  for (double r : c.r) check_range(r >= 0.0 && r <= kTol.max_squeezing, "r must lie in [0, 3]");
  for (double v : c.cooperativity) check_range(v > 0.0, "cooperativity must be positive");
  for (double v : c.n_eff) check_range(v >= 0.0, "n_eff must be non-negative");
  for (double v : c.n_eff_targets) check_range(v > 0.0, "n_eff targets must be positive");
  for (double v : c.eta) check_range(v >= 0.0 && v <= 1.0, "eta must lie in [0, 1]");
  for (int m : c.m) check_range(m >= 0 && m < c.numerics.optical_dim, "m must lie in [0, optical_dim)");
  check_range(c.theta >= 0.0 && c.theta < std::numbers::pi / 2, "theta must lie in [0, pi/2)");
  check_range(c.loss_theta.size() == 3, "loss_theta needs one angle for each of m = 1, 2, 3");
  for (double t : c.loss_theta) check_range(t >= 0.0 && t < std::numbers::pi / 2, "loss_theta outside [0, pi/2)");
  check_range(c.n_th >= 0.0, "n_th must be non-negative");
  check_range(c.kappa_over_gamma > 0.0, "kappa_over_gamma must be positive");
  const auto& n = c.numerics;
  check_range(n.fock_dim >= 2 && n.max_fock_dim >= n.fock_dim, "fock_dim must be >= 2 and <= max_fock_dim");
  check_range(n.optical_dim >= 2, "optical_dim must be >= 2");
  check_range(n.grid_points >= 16, "grid_points must be >= 16");

  const bool needs_state = c.mode != Mode::kPurity;
  if (needs_state) {
    check_range(!c.r.empty() && !c.n_eff.empty() && !c.m.empty(), "r, n_eff and m must be non-empty");
  }
  switch (c.mode) {
    case Mode::kPurity:
      check_range(!c.r.empty(), "r must be non-empty");
      break;
    case Mode::kNonclassicality:
    case Mode::kLosses:
      check_range(!c.eta.empty(), "eta must be non-empty");
      if (c.mode == Mode::kLosses) {
        for (int m : c.m) check_range(m >= 1 && m <= 3, "loss sweep supports m = 1, 2, 3");
      }
      break;
    case Mode::kState:
      check_range(c.r.size() == 1 && c.n_eff.size() == 1 && c.m.size() == 1 && c.eta.size() == 1,
                  "state mode takes a single (r, n_eff, m, eta) tuple");
      break;
    case Mode::kFeasibility: {
      const auto& f = c.feasibility;
      check_range(f.kappa > 0.0 && f.gamma_m > 0.0 && f.omega_m > 0.0 && f.t_bath > 0.0,
                  "feasibility rates and temperature must be positive");
      check_range(f.kappa_ex >= 0.0 && f.kappa_ex <= f.kappa, "kappa_ex must lie in [0, kappa]");
      double eta = f.kappa_ex / f.kappa;
      for (double x : f.efficiency_factors) {
        check_range(x >= 0.0, "efficiency factors must be non-negative");
        eta *= x;
      }
      check_range(eta <= 1.0, "efficiency budget exceeds 1");
      check_range(f.rep_period > 0.0 && f.target_events > 0.0, "rep_period and target_events must be positive");
      check_range(c.r.size() == 1 && c.n_eff.size() == 1 && c.m.size() == 1,
                  "feasibility takes a single (r, n_eff, m)");
      break;
    }
  }
}

ordered_json to_json(const SweepConfig& c) {
  ordered_json j;
  j["schema_version"] = 1;
  j["mode"] = to_string(c.mode);
  j["r"] = c.r;
  j["cooperativity"] = c.cooperativity;
  j["n_eff"] = c.n_eff;
  j["n_eff_targets"] = c.n_eff_targets;
  j["eta"] = c.eta;
  j["m"] = c.m;
  j["theta"] = c.theta;
  j["loss_theta"] = c.loss_theta;
  j["n_th"] = c.n_th;
  j["kappa_over_gamma"] = c.kappa_over_gamma;
  j["numerics"] = {{"fock_dim", c.numerics.fock_dim},
                   {"optical_dim", c.numerics.optical_dim},
                   {"max_fock_dim", c.numerics.max_fock_dim},
                   {"grid_points", c.numerics.grid_points},
                   {"refine", c.numerics.refine}};
  const auto& f = c.feasibility;
  j["feasibility"] = {{"omega_m", f.omega_m},
                      {"kappa", f.kappa},
                      {"kappa_ex", f.kappa_ex},
                      {"gamma_m", f.gamma_m},
                      {"t_bath", f.t_bath},
                      {"g0", f.g0},
                      {"n_cav", f.n_cav},
                      {"t_pulse", f.t_pulse},
                      {"efficiency_factors", f.efficiency_factors},
                      {"cooperativity", f.cooperativity},
                      {"squeeze_g_minus", f.squeeze_g_minus},
                      {"rep_period", f.rep_period},
                      {"target_events", f.target_events}};
  j["output"] = c.output;
  j["format"] = c.format == OutputFormat::kCsv ? "csv" : "json";
  j["dump_dir"] = c.dump_dir;
  j["timing"] = c.timing;
  return j;
}

SweepConfig sweep_config_from_json(const json& doc) {
  const json& j = doc.contains("config") && doc.contains("rows") ? doc.at("config") : doc;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1) {
      throw ConfigError("unsupported schema_version");
    }
    if (!j.contains("mode")) throw ConfigError("config needs a 'mode'");
    SweepConfig c = default_config(mode_from_string(j.at("mode").get<std::string>()));
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const json& v = it.value();
      if (key == "schema_version" || key == "mode") continue;
      if (key == "r") c.r = list_from_json<double>(v, key);
      else if (key == "cooperativity") c.cooperativity = list_from_json<double>(v, key);
      else if (key == "n_eff") c.n_eff = list_from_json<double>(v, key);
      else if (key == "n_eff_targets") c.n_eff_targets = list_from_json<double>(v, key);
      else if (key == "eta") c.eta = list_from_json<double>(v, key);
      else if (key == "m") c.m = list_from_json<int>(v, key);
      else if (key == "theta") c.theta = v.get<double>();
      else if (key == "loss_theta") c.loss_theta = list_from_json<double>(v, key);
      else if (key == "n_th") c.n_th = v.get<double>();
      else if (key == "kappa_over_gamma") c.kappa_over_gamma = v.get<double>();
      else if (key == "output") c.output = v.get<std::string>();
      else if (key == "dump_dir") c.dump_dir = v.get<std::string>();
      else if (key == "timing") c.timing = v.get<bool>();
      else if (key == "format") {
        const auto f = v.get<std::string>();
        if (f != "csv" && f != "json") throw ConfigError("format must be csv or json");
        c.format = f == "csv" ? OutputFormat::kCsv : OutputFormat::kJson;
      } else if (key == "numerics") {
        for (auto n = v.begin(); n != v.end(); ++n) {
          if (n.key() == "fock_dim") c.numerics.fock_dim = n.value().get<int>();
          else if (n.key() == "optical_dim") c.numerics.optical_dim = n.value().get<int>();
          else if (n.key() == "max_fock_dim") c.numerics.max_fock_dim = n.value().get<int>();
          else if (n.key() == "grid_points") c.numerics.grid_points = n.value().get<int>();
          else if (n.key() == "refine") c.numerics.refine = n.value().get<bool>();
          else throw ConfigError("unknown numerics field '" + n.key() + "'");
        }
      } else if (key == "feasibility") {
        auto& f = c.feasibility;
        for (auto n = v.begin(); n != v.end(); ++n) {
          const std::string& k = n.key();
          const json& x = n.value();
          if (k == "omega_m") f.omega_m = x.get<double>();
          else if (k == "kappa") f.kappa = x.get<double>();
          else if (k == "kappa_ex") f.kappa_ex = x.get<double>();
          else if (k == "gamma_m") f.gamma_m = x.get<double>();
          else if (k == "t_bath") f.t_bath = x.get<double>();
          else if (k == "g0") f.g0 = x.get<double>();
          else if (k == "n_cav") f.n_cav = x.get<double>();
          else if (k == "t_pulse") f.t_pulse = x.get<double>();
          else if (k == "efficiency_factors") f.efficiency_factors = list_from_json<double>(x, k);
          else if (k == "cooperativity") f.cooperativity = x.get<double>();
          else if (k == "squeeze_g_minus") f.squeeze_g_minus = x.get<double>();
          else if (k == "rep_period") f.rep_period = x.get<double>();
          else if (k == "target_events") f.target_events = x.get<double>();
          else throw ConfigError("unknown feasibility field '" + k + "'");
        }
      } else {
        throw ConfigError("unknown config field '" + key + "'");
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

ordered_json to_json(const RunRecord& record) {
  ordered_json j;
  j["schema_version"] = 1;
  j["tool"] = "phononsub";
  j["version"] = kToolVersion;
  j["mode"] = to_string(record.config.mode);
  j["config"] = to_json(record.config);
  j["assumptions"] = record.assumptions;
  if (record.config.timing) j["wall_clock_seconds"] = record.wall_clock_seconds;
  j["nonconverged"] = record.nonconverged;
  j["columns"] = record.columns;
  j["rows"] = record.rows;
  return j;
}

void write_csv(std::ostream& os, const RunRecord& record) {
  for (std::size_t c = 0; c < record.columns.size(); ++c) os << (c ? "," : "") << record.columns[c];
  os << '\n';
  for (const auto& row : record.rows) {
    for (std::size_t c = 0; c < record.columns.size(); ++c) {
      const auto it = row.find(record.columns[c]);
      os << (c ? "," : "") << (it == row.end() ? std::string() : csv_cell(*it));
    }
    os << '\n';
  }
}

void write_record(const RunRecord& record) {
  const auto emit = [&](std::ostream& os) {
    if (record.config.format == OutputFormat::kCsv) {
      write_csv(os, record);
    } else {
      os << to_json(record).dump(2) << '\n';
    }
  };
  const std::string& path = record.config.output;
  if (path.empty() || path == "-") {
    emit(std::cout);
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cannot open " + path);
  emit(out);
}

PreparedState prepare_state(const PointSpec& p, const NumericSettings& settings) {
  const auto herald_at = [&](int dim) {
    return herald(squeezed_thermal_state(p.r, p.n_eff, dim), p.theta, p.eta, p.m);
  };
  int dim = settings.fock_dim;
  std::optional<HeraldedResult> result;
  for (;; dim += 40) {
    if (dim > settings.max_fock_dim) {
      throw CutoffError("prepare_state: no converged cutoff up to " + std::to_string(settings.max_fock_dim));
    }
    try {
      HeraldedResult h = herald_at(dim);
      if (h.state.converged()) {
        result = std::move(h);
        break;
      }
    } catch (const CutoffError&) {
    }
  }

  const HeraldedResult doubled = herald_at(2 * dim);
  const DensityMatrix& a = result->state;
  const DensityMatrix& b = doubled.state;
  const auto [ax1, ax2] = quadrature_variances(a);
  const auto [bx1, bx2] = quadrature_variances(b);
  const double delta = std::max({std::abs(result->probability - doubled.probability) / doubled.probability,
                                 std::abs(mean_number(a) - mean_number(b)), std::abs(ax1 - bx1),
                                 std::abs(ax2 - bx2), std::abs(a.purity() - b.purity())});
  if (delta > 1e-6) {
    throw ConvergenceError("prepare_state: doubling the cutoff moves scalars by " + std::to_string(delta));
  }
  return PreparedState{std::move(*result), dim, delta};
}

double cooperativity_for(double r, double target, double n_th, double kappa_over_gamma) {
  double lo = 1.0;
  double hi = 1e5;
  const auto f = [&](double c) { return purity_tradeoff(r, c, n_th, kappa_over_gamma) - target; };
  if (f(lo) <= 0.0) return lo;
  if (f(hi) > 0.0) {
    throw ConvergenceError("cooperativity_for: n_eff target not reached for C <= 1e5");
  }
  while ((hi - lo) > 1e-3 * lo) {
    const double mid = std::sqrt(lo * hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

double bose_occupancy(double omega, double temperature) {
  constexpr double kHbar = 1.054571817e-34;
  constexpr double kBoltzmann = 1.380649e-23;
  if (!(omega > 0.0) || !(temperature > 0.0)) throw InvalidArgument("bose_occupancy: arguments must be positive");
  return 1.0 / std::expm1(kHbar * omega / (kBoltzmann * temperature));
}

RunRecord run_purity_sweep(const SweepConfig& cfg, int threads) {
  validate(cfg);
  RunRecord rec;
  rec.config = cfg;
  rec.columns = {"kind", "r", "cooperativity", "n_th", "n_eff_target", "n_eff", "var_x1", "var_x2", "squeezing",
                 "status"};
  rec.assumptions.push_back("kappa/gamma_m = " + format_number(cfg.kappa_over_gamma) +
                            " keeps g_minus <= kappa/10 over the whole C bracket");

  struct Task {
    std::string kind;
    double r;
    double c;
    double target;
  };
  std::vector<Task> tasks;
  for (double c : cfg.cooperativity)
    for (double r : cfg.r) tasks.push_back({"curve", r, c, 0.0});
  for (double t : cfg.n_eff_targets)
    for (double r : cfg.r) tasks.push_back({"contour", r, 0.0, t});
  tasks.push_back({"working_point", 0.5, 200.0, 0.0});
  tasks.push_back({"working_point", 1.0, 1000.0, 0.0});

  std::vector<PointOutcome> outcomes(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const Task& t = tasks[i];
    auto& v = outcomes[i].values;
    v["cooperativity"] = t.kind == "contour" ? ordered_json(nullptr) : ordered_json(t.c);
    for (const char* key : {"n_eff", "var_x1", "var_x2", "squeezing"}) v[key] = nullptr;
    try {
      const double c = t.kind == "contour" ? cooperativity_for(t.r, t.target, cfg.n_th, cfg.kappa_over_gamma) : t.c;
      v["cooperativity"] = c;
      const CovarianceMatrix cov = solve_steady_covariance(drive_for(t.r, c, cfg.n_th, cfg.kappa_over_gamma));
      v["n_eff"] = cov.n_eff();
      v["var_x1"] = cov.var_x1();
      v["var_x2"] = cov.var_x2();
      v["squeezing"] = cov.squeezing();
    } catch (...) {
      classify(outcomes[i], std::current_exception());
    }
  });
  std::vector<ordered_json> keys;
  for (const Task& t : tasks) {
    ordered_json k;
    k["kind"] = t.kind;
    k["r"] = t.r;
    k["cooperativity"] = nullptr;
    k["n_th"] = cfg.n_th;
    k["n_eff_target"] = t.kind == "contour" ? ordered_json(t.target) : ordered_json(nullptr);
    keys.push_back(std::move(k));
  }
  return finish(std::move(rec), std::move(outcomes), std::move(keys));
}

RunRecord run_nonclassicality_sweep(const SweepConfig& cfg, int threads) {
  validate(cfg);
  RunRecord rec;
  rec.config = cfg;
  rec.columns = {"n_eff", "r", "m", "theta", "eta"};
  rec.columns.insert(rec.columns.end(), kMeasureColumns.begin(), kMeasureColumns.end());

  std::vector<PointSpec> points;
  for (double n : cfg.n_eff)
    for (int m : cfg.m)
      for (double r : cfg.r)
        for (double eta : cfg.eta) points.push_back({r, n, cfg.theta, eta, m});

  std::vector<PointOutcome> outcomes(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const PointSpec& p = points[i];
    const bool panel = close(p.r, 1.0) && close(p.n_eff, 0.02) && p.m >= 1 && p.m <= 3;
    outcomes[i] = evaluate_point(p, cfg.numerics, cfg.dump_dir, "nonclassicality", panel);
  });
  std::vector<ordered_json> keys;
  for (const PointSpec& p : points) {
    ordered_json k;
    k["n_eff"] = p.n_eff;
    k["r"] = p.r;
    k["m"] = p.m;
    k["theta"] = p.theta;
    k["eta"] = p.eta;
    keys.push_back(std::move(k));
  }
  return finish(std::move(rec), std::move(outcomes), std::move(keys));
}

RunRecord run_loss_sweep(const SweepConfig& cfg, int threads) {
  validate(cfg);
  RunRecord rec;
  rec.config = cfg;
  rec.columns = {"r", "m", "theta", "theta_assumed", "eta", "n_eff"};
  rec.columns.insert(rec.columns.end(), kMeasureColumns.begin(), kMeasureColumns.end());
  if (std::find(cfg.m.begin(), cfg.m.end(), 3) != cfg.m.end()) {
    rec.assumptions.push_back("m = 3 uses theta = " + format_number(cfg.loss_theta[2]) +
                              ", an assumed value (rows flagged theta_assumed)");
  }

  std::vector<PointSpec> points;
  for (double n : cfg.n_eff)
    for (double r : cfg.r)
      for (int m : cfg.m)
        for (double eta : cfg.eta) points.push_back({r, n, cfg.loss_theta[m - 1], eta, m});

  std::vector<PointOutcome> outcomes(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const PointSpec& p = points[i];
    const bool panel = close(p.eta, 0.2) && (p.m == 1 || p.m == 2);
    outcomes[i] = evaluate_point(p, cfg.numerics, cfg.dump_dir, "losses", panel);
  });
  std::vector<ordered_json> keys;
  for (const PointSpec& p : points) {
    ordered_json k;
    k["r"] = p.r;
    k["m"] = p.m;
    k["theta"] = p.theta;
    k["theta_assumed"] = p.m == 3;
    k["eta"] = p.eta;
    k["n_eff"] = p.n_eff;
    keys.push_back(std::move(k));
  }
  return finish(std::move(rec), std::move(outcomes), std::move(keys));
}

RunRecord dump_state(const SweepConfig& cfg) {
  validate(cfg);
  RunRecord rec;
  rec.config = cfg;
  rec.columns = {"n_eff", "r", "m", "theta", "eta"};
  rec.columns.insert(rec.columns.end(), kMeasureColumns.begin(), kMeasureColumns.end());
  const PointSpec p{cfg.r[0], cfg.n_eff[0], cfg.theta, cfg.eta[0], cfg.m[0]};
  std::vector<PointOutcome> outcomes{evaluate_point(p, cfg.numerics, cfg.dump_dir, "state", true)};
  ordered_json k;
  k["n_eff"] = p.n_eff;
  k["r"] = p.r;
  k["m"] = p.m;
  k["theta"] = p.theta;
  k["eta"] = p.eta;
  std::vector<ordered_json> keys{std::move(k)};
  return finish(std::move(rec), std::move(outcomes), std::move(keys));
}

RunRecord run_feasibility(const SweepConfig& cfg) {
  validate(cfg);
  const FeasibilityInputs& f = cfg.feasibility;
  RunRecord rec;
  rec.config = cfg;
  rec.columns = {"quantity", "value", "unit", "status"};
  rec.assumptions.push_back("rep_period is a repetition period in seconds");
  rec.assumptions.push_back("the squeezing time is ln(n_th / n_eff) / (C gamma_m)");
  const double two_pi = 2.0 * std::numbers::pi;

  const auto add = [&](const std::string& q, ordered_json value, const std::string& unit,
                       const std::string& status = "ok") {
    ordered_json row;
    row["quantity"] = q;
    row["value"] = std::move(value);
    row["unit"] = unit;
    row["status"] = status;
    rec.rows.push_back(std::move(row));
  };

  double eta = f.kappa_ex / f.kappa;
  add("kappa_ex_over_kappa", eta, "");
  for (double x : f.efficiency_factors) eta *= x;
  add("eta", eta, "");

  const double n_bath = bose_occupancy(f.omega_m, f.t_bath);
  add("n_th_from_t_bath", n_bath, "");
  add("n_th", cfg.n_th, "");
  add("thermal_decoherence_time", 1.0 / (cfg.n_th * f.gamma_m), "s");

  const double c = f.squeeze_g_minus > 0.0 ? 4.0 * f.squeeze_g_minus * f.squeeze_g_minus / (f.kappa * f.gamma_m)
                                           : f.cooperativity;
  add("cooperativity", c, "");
  add("squeezing_rate", c * f.gamma_m, "rad/s");
  add("squeezing_rate_over_2pi", c * f.gamma_m / two_pi, "Hz");
  const double n_eff = cfg.n_eff[0];
  add("squeezing_time", n_eff > 0.0 ? ordered_json(std::log(cfg.n_th / n_eff) / (c * f.gamma_m)) : ordered_json(nullptr),
      "s");
  try {
    add("n_eff_steady_state", purity_tradeoff(cfg.r[0], c, cfg.n_th, f.kappa / f.gamma_m), "");
  } catch (const Error& e) {
    add("n_eff_steady_state", nullptr, "", std::string("error: ") + e.what());
  }

  PulseParams pulse{f.g0, f.n_cav, f.kappa, f.t_pulse, eta};
  double theta = 0.0;
  try {
    theta = theta_from_pulse(pulse);
    add("coupling_over_2pi", pulse.coupling() / two_pi, "Hz");
    add("swap_rate", pulse.swap_rate(), "1/s");
    add("theta", theta, "rad");
    add("reflection", std::sin(theta) * std::sin(theta), "");
  } catch (const Error& e) {
    add("theta", nullptr, "rad", std::string("error: ") + e.what());
    return rec;
  }

  try {
    const PreparedState s = prepare_state({cfg.r[0], n_eff, theta, eta, cfg.m[0]}, cfg.numerics);
    const double p = s.result.probability;
    const double rate = event_rate(p, f.rep_period);
    add("herald_probability", p, "");
    add("events_per_second", rate, "1/s");
    add("seconds_per_event", 1.0 / rate, "s");
    add("hours_for_target_events", f.target_events / rate / 3600.0, "h");
  } catch (...) {
    PointOutcome o;
    classify(o, std::current_exception());
    if (o.nonconverged) ++rec.nonconverged;
    add("herald_probability", nullptr, "", o.status);
  }
  return rec;
}

RunRecord run(const SweepConfig& cfg, int threads) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  switch (cfg.mode) {
    case Mode::kPurity: rec = run_purity_sweep(cfg, threads); break;
    case Mode::kNonclassicality: rec = run_nonclassicality_sweep(cfg, threads); break;
    case Mode::kLosses: rec = run_loss_sweep(cfg, threads); break;
    case Mode::kState: rec = dump_state(cfg); break;
    case Mode::kFeasibility: rec = run_feasibility(cfg); break;
  }
  rec.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace optomech
