#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "labeldist/simulator.hpp"

namespace labeldist {

// Flat `key = value` run configuration. `#` starts a comment (whole-line
// or trailing), blank lines are skipped, duplicate keys are rejected. A
// `rng` key, when present, must name the one supported generator
// (mt19937_64); anything else is rejected rather than silently ignored.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<config>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

// Hyperparameter grid text: either `lo:hi:step` (inclusive arithmetic
// progression) or an explicit comma list `v1,v2,...`. Values must come
// out strictly increasing.
std::vector<double> parse_grid(const std::string& text);

// Budget plan list: plans separated by `;`, each `B:n_single:n_multi:k`
// with `-` accepted for k when n_multi is 0. Plans are not validated
// here (literal out-of-balance rows may be carried under --no-validate).
std::vector<BudgetPlan> parse_plans(const std::string& text);

}  // namespace labeldist
