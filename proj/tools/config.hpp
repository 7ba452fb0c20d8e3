#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spinpair/liouville.hpp"
#include "spinpair/macrocumulant.hpp"

namespace spinpair::cli {

enum class KeyType { real, integer, choice, text };

struct KeySpec {
  std::string name;
  KeyType type;
  std::string fallback;  // default; empty means unset
  std::vector<std::string> choices;
  std::string help;
};

const std::vector<KeySpec>& config_keys();
const std::vector<std::string>& commands();

using Values = std::map<std::string, std::string>;

// Flat `key = value` text; '#' starts a comment. Unknown keys and malformed lines are
// appended to `errors` with their line numbers.
Values parse_config_text(const std::string& text, std::vector<std::string>& errors);

struct RunConfig {
  std::string command;
  Values values;                 // fully resolved, every key present
  std::set<std::string> explicit_keys;
  std::vector<std::string> violations;

  double real(const std::string& key) const;
  int integer(const std::string& key) const;
  const std::string& text(const std::string& key) const { return values.at(key); }
  bool is_set(const std::string& key) const { return !values.at(key).empty(); }

  EngineParams engine() const;
  MacroParams macro() const;
  double T1() const;
  double T2() const;

  // Sorted key=value lines; the basis of the config hash.
  std::string canonical() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;
};

// Precedence: flags > file > defaults. Every violation is collected.
RunConfig resolve(const std::string& command, const Values& file, const Values& flags);

}  // namespace spinpair::cli
