#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace spinpair::cli {

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = {
      {"units", KeyType::choice, "E1", {"E1", "omega0"}, "energy unit"},
      {"E1", KeyType::real, "", {}, "cold spacing (default 1, or 100 in omega0 units)"},
      {"E2", KeyType::real, "", {}, "hot spacing (default 2 E1)"},
      {"omega0", KeyType::real, "", {}, "drive strength (default 0.006, or 1 in omega0 units)"},
      {"gamma0", KeyType::real, "", {}, "decay rate (default 0.001, or 1 in omega0 units)"},
      {"T1", KeyType::real, "", {}, "cold temperature (default 2 E1)"},
      {"T2", KeyType::real, "", {}, "hot temperature (default 22 E1)"},
      {"beta1", KeyType::real, "", {}, "cold inverse temperature (alternative to T1)"},
      {"beta2", KeyType::real, "", {}, "hot inverse temperature (alternative to T2)"},
      {"n", KeyType::integer, "1", {}, "number of spin pairs"},
      {"scaling", KeyType::choice, "none", {"none", "high_temperature"}, "parameter scaling"},
      {"betaE", KeyType::real, "2", {}, "beta*E for the dissipative benchmark"},
      {"model", KeyType::choice, "macro", {"exact", "macro", "alpha"}, "scan / gap model"},
      {"dE_min", KeyType::real, "0.25", {}, "scan: smallest Delta E"},
      {"dE_max", KeyType::real, "10", {}, "scan: largest Delta E"},
      {"dE_points", KeyType::integer, "32", {}, "scan: Delta E samples"},
      {"Tbar_min", KeyType::real, "11", {}, "scan: smallest mean temperature"},
      {"Tbar_max", KeyType::real, "40", {}, "scan: largest mean temperature"},
      {"Tbar_points", KeyType::integer, "32", {}, "scan: mean-temperature samples"},
      {"dT", KeyType::real, "20", {}, "scan: temperature bias T2 - T1"},
      {"n_min", KeyType::integer, "1", {}, "scaling/gap: smallest N"},
      {"n_max", KeyType::integer, "20", {}, "scaling/gap: largest N"},
      {"stability", KeyType::real, "0.05", {}, "scaling: local-slope tolerance for N_sat"},
      {"with_variance", KeyType::choice, "true", {"true", "false"}, "exact: compute Var(P)"},
      {"macro_tol", KeyType::real, "1e-12", {}, "macro steady-state residual"},
      {"macro_t_max", KeyType::real, "1e10", {}, "macro integration horizon"},
      {"max_n", KeyType::integer, "64", {}, "exact solver size cap"},
  };
  return keys;
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"exact", "macro", "dissipative", "fluctuations",
                                             "correlations", "scan", "scaling", "gap"};
  return c;
}

namespace {

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : config_keys())
    if (k.name == name) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_real(const std::string& s, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

bool parse_int(const std::string& s, int& out) {
  try {
    size_t pos = 0;
    out = std::stoi(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

std::string check_value(const KeySpec& k, const std::string& v) {
  if (v.empty()) return "";
  double d;
  int i;
  switch (k.type) {
    case KeyType::real:
      if (!parse_real(v, d)) return k.name + ": '" + v + "' is not a number";
      break;
    case KeyType::integer:
      if (!parse_int(v, i)) return k.name + ": '" + v + "' is not an integer";
      break;
    case KeyType::choice:
      if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
        std::string msg = k.name + ": '" + v + "' is not one of";
        for (const auto& c : k.choices) msg += " " + c;
        return msg;
      }
      break;
    case KeyType::text:
      break;
  }
  return "";
}

bool uses_exact(const RunConfig& c) {
  const std::string& m = c.values.at("model");
  return c.command == "exact" || c.command == "scaling" ||
         ((c.command == "scan" || c.command == "gap") && m != "macro");
}

bool uses_macro(const RunConfig& c) {
  return c.command == "macro" || c.command == "fluctuations" || c.command == "correlations" ||
         ((c.command == "scan" || c.command == "gap") && c.values.at("model") == "macro");
}

}  // namespace

Values parse_config_text(const std::string& text, std::vector<std::string>& errors) {
  Values out;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(no) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (!find_key(key)) {
      errors.push_back("line " + std::to_string(no) + ": unknown key '" + key + "'");
      continue;
    }
    if (out.count(key)) errors.push_back("line " + std::to_string(no) + ": duplicate key '" + key + "'");
    out[key] = value;
  }
  return out;
}

double RunConfig::real(const std::string& key) const {
  double d = NAN;
  parse_real(values.at(key), d);
  return d;
}

int RunConfig::integer(const std::string& key) const {
  int i = 0;
  parse_int(values.at(key), i);
  return i;
}

double RunConfig::T1() const { return is_set("beta1") ? 1.0 / real("beta1") : real("T1"); }
double RunConfig::T2() const { return is_set("beta2") ? 1.0 / real("beta2") : real("T2"); }

EngineParams RunConfig::engine() const {
  EngineParams p;
  p.E1 = real("E1");
  p.E2 = real("E2");
  p.omega0 = real("omega0");
  p.gamma0 = real("gamma0");
  p.beta1 = 1.0 / T1();
  p.beta2 = 1.0 / T2();
  p.N = integer("n");
  p.scaling = text("scaling") == "high_temperature" ? Scaling::high_temperature : Scaling::none;
  return p;
}

MacroParams RunConfig::macro() const {
  return MacroParams::from_temperatures(real("E1"), real("E2"), real("omega0"), real("gamma0"), T1(),
                                        T2());
}

std::string RunConfig::canonical() const {
  std::string s = "command=" + command + "\n";
  for (const auto& [k, v] : values) s += k + "=" + v + "\n";
  return s;
}

std::uint64_t RunConfig::hash() const {
  // FNV-1a: stable across platforms and runs
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

RunConfig resolve(const std::string& command, const Values& file, const Values& flags) {
  RunConfig c;
  c.command = command;
  if (std::find(commands().begin(), commands().end(), command) == commands().end())
    c.violations.push_back("unknown command '" + command + "'");
  for (const auto& k : config_keys()) c.values[k.name] = k.fallback;
  for (const Values* layer : {&file, &flags})
    for (const auto& [k, v] : *layer) {
      if (!find_key(k)) {
        c.violations.push_back("unknown key '" + k + "'");
        continue;
      }
      c.values[k] = v;
      c.explicit_keys.insert(k);
    }
  for (const auto& k : config_keys()) {
    const std::string err = check_value(k, c.values[k.name]);
    if (!err.empty()) c.violations.push_back(err);
  }
  if (!c.violations.empty()) return c;

  // unit-dependent defaults
  const bool omega_units = c.values["units"] == "omega0";
  auto fill = [&](const std::string& key, const std::string& v) {
    if (c.values[key].empty()) c.values[key] = v;
  };
  fill("E1", omega_units ? "100" : "1");
  fill("omega0", omega_units ? "1" : "0.006");
  fill("gamma0", omega_units ? "1" : "0.001");
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", 2 * c.real("E1"));
    fill("E2", buf);
  }
  const bool t1 = c.explicit_keys.count("T1"), t2 = c.explicit_keys.count("T2");
  const bool b1 = c.explicit_keys.count("beta1"), b2 = c.explicit_keys.count("beta2");
  if (t1 && b1) c.violations.push_back("set either T1 or beta1, not both");
  if (t2 && b2) c.violations.push_back("set either T2 or beta2, not both");
  if (!b1) fill("T1", omega_units ? "100" : "2");
  if (!b2) fill("T2", omega_units ? "200" : "22");
  if (omega_units && c.real("omega0") != 1.0)
    c.violations.push_back("omega0 must be 1 when units = omega0");
  if (!omega_units && c.real("E1") != 1.0) c.violations.push_back("E1 must be 1 when units = E1");

  for (const char* k : {"T1", "T2", "beta1", "beta2"})
    if (c.is_set(k) && !(c.real(k) > 0)) c.violations.push_back(std::string(k) + " must be > 0");
  if (!c.violations.empty()) return c;

  std::vector<std::string> v;
  if (uses_exact(c)) v = c.engine().violations();
  else if (uses_macro(c)) v = c.macro().violations();
  if (c.command == "gap" && c.text("model") == "alpha") v.push_back("model alpha applies to scan only");
  if (c.command == "dissipative" && !(c.real("betaE") > 0)) v.push_back("betaE must be > 0");
  if (c.command == "scan") {
    if (c.integer("dE_points") < 1) v.push_back("dE_points must be ≥ 1");
    if (c.integer("Tbar_points") < 1) v.push_back("Tbar_points must be ≥ 1");
    if (c.real("dE_min") > c.real("dE_max")) v.push_back("dE_min must be ≤ dE_max");
    if (c.real("dE_min") < 0) v.push_back("dE_min must be ≥ 0");
    if (c.real("Tbar_min") > c.real("Tbar_max")) v.push_back("Tbar_min must be ≤ Tbar_max");
    if (!(c.real("dT") >= 0)) v.push_back("dT must be ≥ 0");
    if (!(c.real("Tbar_min") - c.real("dT") / 2 > 0)) v.push_back("Tbar_min - dT/2 must be > 0");
  }
  if (c.command == "scaling" || c.command == "gap" || (c.command == "scan" && c.text("model") == "alpha")) {
    if (c.integer("n_min") < 1) v.push_back("n_min must be ≥ 1");
    if (c.integer("n_max") < c.integer("n_min")) v.push_back("n_max must be ≥ n_min");
    if (c.integer("n_max") > c.integer("max_n")) v.push_back("n_max must be ≤ max_n");
  }
  if (c.integer("n") > c.integer("max_n")) v.push_back("n must be ≤ max_n");
  if (!(c.real("stability") > 0)) v.push_back("stability must be > 0");
  if (!(c.real("macro_tol") > 0)) v.push_back("macro_tol must be > 0");
  if (!(c.real("macro_t_max") > 0)) v.push_back("macro_t_max must be > 0");
  c.violations.insert(c.violations.end(), v.begin(), v.end());
  return c;
}

}  // namespace spinpair::cli
