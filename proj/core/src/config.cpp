#include "labeldist/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "labeldist/errors.hpp"
#include "labeldist/rng.hpp"

namespace labeldist {

namespace {

std::string trim(const std::string& s) {
  std::size_t lo = 0;
  std::size_t hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double_token(const std::string& token, const std::string& what) {
  const std::string t = trim(token);
  if (t.empty()) throw InputError(what + ": empty number");
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw InputError(what + ": '" + t + "' is not a number");
  }
  if (pos != t.size()) throw InputError(what + ": '" + t + "' is not a number");
  if (!std::isfinite(value)) throw InputError(what + ": '" + t + "' is not finite");
  return value;
}

std::int64_t parse_int_token(const std::string& token, const std::string& what) {
  const std::string t = trim(token);
  if (t.empty()) throw InputError(what + ": empty integer");
  std::size_t pos = 0;
  long long value = 0;
  try {
    value = std::stoll(t, &pos);
  } catch (const std::exception&) {
    throw InputError(what + ": '" + t + "' is not an integer");
  }
  if (pos != t.size()) throw InputError(what + ": '" + t + "' is not an integer");
  return value;
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config config;
  config.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw InputError(origin + ":" + std::to_string(lineno) +
                       ": expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (config.values_.count(key) != 0) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    config.values_[key] = value;
  }
  if (config.has("rng") && config.get_string("rng") != kRngAlgorithm) {
    throw InputError(origin + ": unsupported rng '" + config.get_string("rng") +
                     "' (only " + std::string(kRngAlgorithm) + " is supported)");
  }
  return config;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path);
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw InputError(origin_ + ": missing required key '" + key + "'");
  }
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  return parse_double_token(get_string(key), origin_ + ": key '" + key + "'");
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key) const {
  return parse_int_token(get_string(key), origin_ + ": key '" + key + "'");
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string t = trim(get_string(key));
  const std::string what = origin_ + ": key '" + key + "'";
  if (t.empty()) throw InputError(what + ": empty integer");
  if (t[0] == '-') throw InputError(what + ": '" + t + "' must be non-negative");
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(t, &pos);
  } catch (const std::exception&) {
    throw InputError(what + ": '" + t + "' is not an integer");
  }
  if (pos != t.size()) throw InputError(what + ": '" + t + "' is not an integer");
  return value;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InputError(origin_ + ": key '" + key + "': expected true/false, got '" + v + "'");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw InputError("grid: empty specification");

  std::vector<double> values;
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) {
      throw InputError("grid: expected lo:hi:step, got '" + t + "'");
    }
    const double lo = parse_double_token(parts[0], "grid lo");
    const double hi = parse_double_token(parts[1], "grid hi");
    const double step = parse_double_token(parts[2], "grid step");
    if (!(step > 0.0)) throw InputError("grid: step must be > 0");
    if (hi < lo) throw InputError("grid: hi must be >= lo");
    // Count-based generation avoids drift from repeated addition; the
    // epsilon admits an hi that is intended to land on the grid.
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      values.push_back(lo + static_cast<double>(i) * step);
    }
  } else {
    for (const std::string& part : split(t, ',')) {
      values.push_back(parse_double_token(part, "grid value"));
    }
  }

  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw InputError("grid: values must be strictly increasing");
    }
  }
  return values;
}

std::vector<BudgetPlan> parse_plans(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw InputError("plans: empty specification");
  std::vector<BudgetPlan> plans;
  for (const std::string& item : split(t, ';')) {
    const std::string spec = trim(item);
    if (spec.empty()) throw InputError("plans: empty plan entry");
    const auto parts = split(spec, ':');
    if (parts.size() != 4) {
      throw InputError("plans: expected budget:n_single:n_multi:k, got '" + spec + "'");
    }
    BudgetPlan plan;
    plan.budget = parse_int_token(parts[0], "plan budget");
    plan.n_single = parse_int_token(parts[1], "plan n_single");
    plan.n_multi = parse_int_token(parts[2], "plan n_multi");
    const std::string k = trim(parts[3]);
    plan.k_way = (k == "-") ? 0 : parse_int_token(k, "plan k_way");
    plans.push_back(plan);
  }
  return plans;
}

}  // namespace labeldist
