#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "config.hpp"
#include "spinpair/correlations.hpp"
#include "spinpair/macrofluct.hpp"
#include "spinpair/studies.hpp"
#include "spinpair/thermo.hpp"

#ifndef SPINPAIR_VERSION
#define SPINPAIR_VERSION "dev"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace spinpair;
using namespace spinpair::cli;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// One CSV table: fixed leading columns, then value columns in first-seen order.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::map<std::string, std::string>> rows;

  void add_row(const std::vector<std::pair<std::string, std::string>>& cells) {
    std::map<std::string, std::string> r;
    for (const auto& [k, v] : cells) {
      if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
      r[k] = v;
    }
    rows.push_back(std::move(r));
  }
};

struct Outcome {
  Table table;
  json summary = json::object();
  json errors = json::array();
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

json tolerances(const RunConfig& c) {
  return {{"steady_residual", 1e-10},  {"positivity", -1e-8},
          {"tomography_clip", 1e-6},   {"macro_tol", c.real("macro_tol")},
          {"macro_t_max", c.real("macro_t_max")}, {"stability", c.real("stability")},
          {"zero_power", 1e-12}};
}

void write_csv(const fs::path& file, const RunConfig& c, const Table& t) {
  std::ofstream out(file, std::ios::binary);
  out << "# spinpair " << SPINPAIR_VERSION << " command=" << c.command
      << " config_hash=" << c.hash_hex() << "\n";
  out << "# tolerances";
  const json tol = tolerances(c);
  for (const auto& [k, v] : tol.items()) out << " " << k << "=" << v.dump();
  out << "\n";
  for (size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_field(t.columns[i]);
  out << "\n";
  for (const auto& r : t.rows) {
    for (size_t i = 0; i < t.columns.size(); ++i) {
      const auto it = r.find(t.columns[i]);
      out << (i ? "," : "") << (it == r.end() ? "" : csv_field(it->second));
    }
    out << "\n";
  }
}

void write_json(const fs::path& file, const json& j) {
  std::ofstream out(file, std::ios::binary);
  out << j.dump(2) << "\n";
}

json error_entry(const std::string& kind, const std::string& message) {
  return {{"kind", kind}, {"message", message}};
}

const char* kVarName[6] = {"x1", "y1", "z1", "x2", "y2", "z2"};

void add_moments(std::vector<std::pair<std::string, std::string>>& row, const MomentState& s) {
  for (int a = 0; a < 6; ++a) row.emplace_back(std::string("m_") + kVarName[a], num(s.first(a)));
  for (int a = 0; a < 6; ++a)
    for (int b = a; b < 6; ++b)
      row.emplace_back(std::string("m_") + kVarName[a] + kVarName[b], num(s.second(a, b)));
}

MacroSteadyState solve_macro(const RunConfig& c, const MacroParams& p,
                             const MomentState& init = MomentState::polarized_down(0.01)) {
  return macro_steady_state(p, init, c.real("macro_t_max"), c.real("macro_tol"));
}

Outcome run_exact(const RunConfig& c) {
  const EngineParams p = c.engine();
  const ThermoReport r = thermo_report(p, c.text("with_variance") == "true");
  Outcome o;
  std::vector<std::pair<std::string, std::string>> row = {
      {"N", std::to_string(p.N)}, {"E1", num(p.E1)}, {"E2", num(p.E2)},
      {"T1", num(c.T1())}, {"T2", num(c.T2())}, {"power", num(r.power)},
      {"q_cold", num(r.q_cold)}, {"q_hot", num(r.q_hot)}, {"efficiency", num(r.efficiency)},
      {"cop", num(r.cop)}, {"entropy_rate", num(r.entropy_rate)}};
  if (c.text("with_variance") == "true") {
    row.emplace_back("variance", num(r.variance));
    row.emplace_back("fano", num(r.fano));
    row.emplace_back("constancy", num(r.constancy));
  }
  row.emplace_back("mode", to_string(r.mode));
  o.table.add_row(row);
  return o;
}

Outcome run_dissipative(const RunConfig& c) {
  const double x = c.real("betaE"), G = c.real("gamma0");
  const auto a = dissipative_ss_analytic(x);
  const auto cl = dissipative_steady_state(x, G);
  const auto J = jacobian_dissipative(x, G);
  Outcome o;
  std::vector<std::pair<std::string, std::string>> row = {
      {"betaE", num(x)}, {"mz", num(a.mz)}, {"mz2", num(a.mz2)}, {"mx2", num(a.mx2)},
      {"closure_mz", num(cl.mz)}, {"closure_mz2", num(cl.mz2)}, {"closure_mx2", num(cl.mx2)},
      {"A", num(J.A)}, {"lambda_plus", num(J.closed_form[0].real())},
      {"lambda_minus", num(J.closed_form[1].real())}, {"jacobian_gap", num(J.gap)}};
  try {
    row.emplace_back("transient_size", std::to_string(transient_size(x, 1e-10)));
  } catch (const RangeError& e) {
    o.errors.push_back(error_entry(e.kind(), std::string("transient_size: ") + e.what()));
  }
  o.table.add_row(row);
  return o;
}

Outcome run_macro(const RunConfig& c) {
  const MacroParams p = c.macro();
  const MacroSteadyState ss = solve_macro(c, p);
  // second start: unpolarized, uncorrelated; reports sensitivity to initial conditions
  Eigen::Matrix<double, 6, 1> mean = Eigen::Matrix<double, 6, 1>::Zero(),
                              sq = Eigen::Matrix<double, 6, 1>::Constant(1.0 / 3);
  double spread = NAN;
  try {
    spread = (solve_macro(c, p, MomentState::product(mean, sq)).state.v - ss.state.v)
                 .cwiseAbs().maxCoeff();
  } catch (const Error&) {
  }
  const double P = macro_power(ss.state, p);
  const EngineGap g = jacobian_gap_engine(p, ss);
  Outcome o;
  std::vector<std::pair<std::string, std::string>> row = {
      {"E1", num(p.E1)}, {"E2", num(p.E2)}, {"T1", num(p.T1())}, {"T2", num(p.T2())},
      {"power", num(P)}, {"residual", num(ss.residual)}, {"t_final", num(ss.t_final)},
      {"newton", ss.newton ? "1" : "0"}, {"delta_E_star", num(delta_E_star(p.E1, p.T1(), p.T2()))},
      {"jacobian_gap", num(g.gap)}, {"stable", g.stable ? "1" : "0"},
      {"initial_condition_spread", std::isnan(spread) ? "" : num(spread)}};
  try {
    const double P1 = single_pair_power(p);
    row.emplace_back("power_single", num(P1));
    row.emplace_back("gain", num(gain_ratio(p, ss.state)));
  } catch (const Error& e) {
    o.errors.push_back(error_entry(e.kind(), std::string("gain: ") + e.what()));
  }
  add_moments(row, ss.state);
  o.table.add_row(row);
  return o;
}

Outcome run_fluctuations(const RunConfig& c) {
  const MacroParams p = c.macro();
  const MomentState ss = solve_macro(c, p).state;
  const double P = macro_power(ss, p);
  const double var = macro_power_variance(ss, p);
  const TwoTimeSystem sys = build_two_time_system(ss, p);
  Outcome o;
  std::vector<std::pair<std::string, std::string>> row = {
      {"E1", num(p.E1)}, {"E2", num(p.E2)}, {"T1", num(p.T1())}, {"T2", num(p.T2())},
      {"power", num(P)}, {"variance", num(var)}, {"fano", num(var / P)},
      {"two_time_max_re", num(sys.M.eigenvalues().real().maxCoeff())}};
  try {
    row.emplace_back("constancy", num(macro_constancy(ss, p)));
  } catch (const ModeError&) {
    row.emplace_back("constancy_value", num(macro_constancy_value(P, var, p)));
  }
  o.table.add_row(row);
  return o;
}

Outcome run_correlations(const RunConfig& c) {
  const MacroParams p = c.macro();
  const TwoSpinState st = reduced_two_spin_state(solve_macro(c, p).state);
  Outcome o;
  std::vector<std::pair<std::string, std::string>> row = {
      {"E1", num(p.E1)}, {"E2", num(p.E2)}, {"T1", num(p.T1())}, {"T2", num(p.T2())},
      {"mutual_information", num(mutual_information(st))}, {"concurrence", num(concurrence(st))},
      {"clip_applied", st.clip_applied ? "1" : "0"}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const std::string k = "rho" + std::to_string(i) + std::to_string(j);
      row.emplace_back(k + "_re", num(st.rho12(i, j).real()));
      row.emplace_back(k + "_im", num(st.rho12(i, j).imag()));
    }
  o.table.add_row(row);
  return o;
}

std::vector<int> n_range(const RunConfig& c) {
  std::vector<int> n;
  for (int i = c.integer("n_min"); i <= c.integer("n_max"); ++i) n.push_back(i);
  return n;
}

Outcome run_scan(const RunConfig& c, int threads) {
  const auto dE = linspace(c.real("dE_min"), c.real("dE_max"), c.integer("dE_points"));
  const auto Tb = linspace(c.real("Tbar_min"), c.real("Tbar_max"), c.integer("Tbar_points"));
  const double dT = c.real("dT");
  const std::string model = c.text("model");
  CellFunction cell;
  if (model == "exact") {
    const EngineParams t = c.engine();
    const bool var = c.text("with_variance") == "true";
    cell = [=](double a, double b) { return exact_cell(t, a, b, dT, var); };
  } else if (model == "macro") {
    const MacroParams t = c.macro();
    cell = [=](double a, double b) { return macro_cell(t, a, b, dT); };
  } else {
    const EngineParams t = c.engine();
    const auto n = n_range(c);
    const double stab = c.real("stability");
    cell = [=](double a, double b) {
      EngineParams p = t;
      p.E2 = p.E1 + a;
      p.beta1 = 1.0 / (b - dT / 2);
      p.beta2 = 1.0 / (b + dT / 2);
      const ScalingFit f = scaling_exponent(p, n, stab, 1);
      CellResult r;
      r.values = {{"alpha", f.alpha}, {"n_sat", double(f.n_sat)}, {"r_squared", f.r_squared},
                  {"delta_E_star", delta_E_star(p.E1, b - dT / 2, b + dT / 2)}};
      p.N = 1;
      r.mode = to_string(thermo_report(p, false).mode);
      return r;
    };
  }
  const ScanGrid g = scan("dE", dE, "Tbar", Tb, cell, threads);
  Outcome o;
  std::set<std::string> keys;
  for (const auto& cr : g.cells)
    for (const auto& [k, v] : cr.values) keys.insert(k);
  for (size_t i = 0; i < dE.size(); ++i)
    for (size_t j = 0; j < Tb.size(); ++j) {
      const CellResult& cr = g.at(i, j);
      std::vector<std::pair<std::string, std::string>> row = {{"dE", num(dE[i])}, {"Tbar", num(Tb[j])}};
      for (const auto& k : keys) {
        const auto it = cr.values.find(k);
        row.emplace_back(k, it == cr.values.end() ? "" : num(it->second));
      }
      row.emplace_back("mode", cr.mode);
      row.emplace_back("error", cr.error.value_or(""));
      o.table.add_row(row);
      if (cr.error)
        o.errors.push_back({{"dE", dE[i]}, {"Tbar", Tb[j]}, {"kind", "CellError"}, {"message", *cr.error}});
    }
  o.summary = {{"cells", g.cells.size()}, {"failed_cells", o.errors.size()}};
  return o;
}

Outcome run_scaling(const RunConfig& c, int threads) {
  const EngineParams p = c.engine();
  const auto n = n_range(c);
  std::vector<double> P(n.size());
  parallel_for(static_cast<int>(n.size()), [&](int i) {
    EngineParams q = p;
    q.N = n[i];
    P[i] = finite_power(q);
  }, threads);
  EngineParams one = p;
  one.N = 1;
  const double P1 = n.front() == 1 ? P.front() : finite_power(one);
  Outcome o;
  std::optional<ScalingFit> fit;
  try {
    fit = scaling_exponent(p, n, c.real("stability"), threads);
  } catch (const Error& e) {
    o.errors.push_back(error_entry(e.kind(), e.what()));
  }
  for (size_t i = 0; i < n.size(); ++i) {
    std::vector<std::pair<std::string, std::string>> row = {
        {"N", std::to_string(n[i])}, {"power", num(P[i])}, {"ratio", num(P[i] / P1)},
        {"fitted", fit && n[i] > fit->n_sat ? "1" : "0"},
        {"alpha", fit ? num(fit->alpha) : ""}, {"n_sat", fit ? std::to_string(fit->n_sat) : ""},
        {"r_squared", fit ? num(fit->r_squared) : ""}};
    o.table.add_row(row);
  }
  if (fit) o.summary = {{"alpha", fit->alpha}, {"n_sat", fit->n_sat}, {"r_squared", fit->r_squared}};
  return o;
}

Outcome run_gap(const RunConfig& c, int threads) {
  Outcome o;
  if (c.text("model") == "macro") {
    const MacroParams p = c.macro();
    const EngineGap g = jacobian_gap_engine(p, solve_macro(c, p));
    o.table.add_row({{"model", "macro"}, {"N", ""}, {"gap", num(g.gap)}, {"stable", g.stable ? "1" : "0"}});
    return o;
  }
  const auto n = n_range(c);
  std::vector<double> gaps(n.size());
  parallel_for(static_cast<int>(n.size()), [&](int i) {
    EngineParams q = c.engine();
    q.N = n[i];
    gaps[i] = gap(build(q, c.integer("max_n")));
  }, threads);
  for (size_t i = 0; i < n.size(); ++i)
    o.table.add_row({{"model", "exact"}, {"N", std::to_string(n[i])}, {"gap", num(gaps[i])},
                     {"stable", gaps[i] > 0 ? "1" : "0"}});
  return o;
}

json manifest(const RunConfig& c, int threads, const std::string& status, const json& summary) {
  json cfg = json::object();
  for (const auto& [k, v] : c.values) cfg[k] = v;
  return {{"tool", "spinpair"},
          {"version", SPINPAIR_VERSION},
          {"command", c.command},
          {"config_hash", c.hash_hex()},
          {"units", c.values.count("units") ? c.values.at("units") : "E1"},
          {"config", cfg},
          {"explicit_keys", c.explicit_keys},
          {"tolerances", c.violations.empty() ? tolerances(c) : json::object()},
          {"threads", threads},
          {"outputs", {"results.csv", "manifest.json", "errors.json"}},
          {"status", status},
          {"summary", summary}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective two-ensemble spin heat engine"};
  app.require_subcommand(1);
  std::string config_file, out_dir = "run";
  int threads = 0;
  Values flags;
  for (const auto& name : commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_file, "flat key = value config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: SPINPAIR_THREADS or all cores)");
    for (const auto& k : config_keys())
      sub->add_option_function<std::string>("--" + k.name, [&flags, n = k.name](const std::string& v) {
        flags[n] = v;
      }, k.help);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::vector<std::string> file_errors;
  Values file;
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) {
      file_errors.push_back("cannot read config file '" + config_file + "'");
    } else {
      std::stringstream ss;
      ss << in.rdbuf();
      file = parse_config_text(ss.str(), file_errors);
    }
  }
  RunConfig cfg = resolve(command, file, flags);
  cfg.violations.insert(cfg.violations.begin(), file_errors.begin(), file_errors.end());
  const int workers = resolve_threads(threads);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const bool writable = !ec;
  if (!cfg.violations.empty()) {
    json errs = json::array();
    for (const auto& v : cfg.violations) {
      std::cerr << "error: " << v << "\n";
      errs.push_back(error_entry("InvalidConfig", v));
    }
    if (writable) {
      write_json(fs::path(out_dir) / "errors.json", errs);
      write_json(fs::path(out_dir) / "manifest.json", manifest(cfg, workers, "invalid_config", json::object()));
    }
    return kExitConfig;
  }
  if (!writable) {
    std::cerr << "error: cannot create output directory '" << out_dir << "'\n";
    return kExitRuntime;
  }

  Outcome o;
  try {
    if (command == "exact") o = run_exact(cfg);
    else if (command == "macro") o = run_macro(cfg);
    else if (command == "dissipative") o = run_dissipative(cfg);
    else if (command == "fluctuations") o = run_fluctuations(cfg);
    else if (command == "correlations") o = run_correlations(cfg);
    else if (command == "scan") o = run_scan(cfg, workers);
    else if (command == "scaling") o = run_scaling(cfg, workers);
    else o = run_gap(cfg, workers);
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    write_json(fs::path(out_dir) / "errors.json", json::array({error_entry(e.kind(), e.what())}));
    write_json(fs::path(out_dir) / "manifest.json", manifest(cfg, workers, "error", json::object()));
    return kExitRuntime;
  }
  write_csv(fs::path(out_dir) / "results.csv", cfg, o.table);
  write_json(fs::path(out_dir) / "errors.json", o.errors);
  const bool partial = !o.errors.empty();
  write_json(fs::path(out_dir) / "manifest.json", manifest(cfg, workers, partial ? "partial" : "ok", o.summary));
  return partial ? kExitPartial : 0;
}
