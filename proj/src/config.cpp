/*
 * This file is part of misobo, a library for multi-information source
 * Bayesian optimization.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "misobo/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace misobo {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& text, double* out) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') return false;
  *out = v;
  return true;
}

ConfigValue parse_value(const std::string& raw, const std::string& where) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError(where + ": missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ConfigError(where + ": unterminated string");
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '[') {
    if (v.back() != ']') throw ConfigError(where + ": unterminated array");
    std::vector<double> items;
    std::string body = v.substr(1, v.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;
      double num = 0.0;
      if (!parse_number(t, &num)) throw ConfigError(where + ": array entries must be numbers");
      items.push_back(num);
    }
    return items;
  }
  double num = 0.0;
  if (parse_number(v, &num)) return num;
  return v;  // bare word, treated as a string
}

}  // namespace

std::map<std::string, ConfigValue> parse_config_text(const std::string& text,
                                                     const std::string& origin) {
  std::map<std::string, ConfigValue> values;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (values.count(full)) throw ConfigError(where + ": duplicate key '" + full + "'");
    values[full] = parse_value(body.substr(eq + 1), where + " (" + full + ")");
  }
  return values;
}

std::map<std::string, ConfigValue> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

namespace {

class ConfigReader {
 public:
  ConfigReader(const std::map<std::string, ConfigValue>& values, std::string origin)
      : values_(values), origin_(std::move(origin)) {}

  double number(const std::string& key, double fallback) {
    const ConfigValue* v = find(key);
    if (!v) return fallback;
    if (const double* d = std::get_if<double>(v)) return *d;
    throw ConfigError(origin_ + ": field '" + key + "' must be a number");
  }

  int integer(const std::string& key, int fallback) {
    const double v = number(key, static_cast<double>(fallback));
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9) throw ConfigError(origin_ + ": field '" + key + "' must be an integer");
    return static_cast<int>(r);
  }

  bool boolean(const std::string& key, bool fallback) {
    const ConfigValue* v = find(key);
    if (!v) return fallback;
    if (const bool* b = std::get_if<bool>(v)) return *b;
    throw ConfigError(origin_ + ": field '" + key + "' must be true or false");
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const ConfigValue* v = find(key);
    if (!v) return fallback;
    if (const std::string* s = std::get_if<std::string>(v)) return *s;
    throw ConfigError(origin_ + ": field '" + key + "' must be a string");
  }

  std::vector<double> array(const std::string& key, std::vector<double> fallback = {}) {
    const ConfigValue* v = find(key);
    if (!v) return fallback;
    if (const auto* a = std::get_if<std::vector<double>>(v)) return *a;
    throw ConfigError(origin_ + ": field '" + key + "' must be an array of numbers");
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      if (!seen_.count(key)) throw ConfigError(origin_ + ": unknown field '" + key + "'");
    }
  }

 private:
  const ConfigValue* find(const std::string& key) {
    seen_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, ConfigValue>& values_;
  std::string origin_;
  mutable std::set<std::string> seen_;
};

}  // namespace

RunConfig run_config_from_values(const std::map<std::string, ConfigValue>& values,
                                 const std::string& origin) {
  ConfigReader r(values, origin);
  RunConfig c;

  c.problem = r.text("problem.name", c.problem);
  c.custom_file = r.text("problem.file", c.custom_file);
  c.dimension = r.integer("problem.dimension", c.dimension);
  c.problem_seed = static_cast<std::uint64_t>(r.number("problem.seed", static_cast<double>(c.problem_seed)));

  c.kernel_family = kernel_family_from_string(r.text("kernel.family", to_string(c.kernel_family)));
  {
    const std::vector<double> fid = r.array("kernel.fidelity_coeffs");
    c.fidelity = fid;
    const std::vector<double> groups = r.array("kernel.groups");
    for (double g : groups) c.groups.push_back(static_cast<int>(g));
    c.group_signal_variances = r.array("kernel.group_signal_variances");
    for (std::size_t q = 0; q < c.group_signal_variances.size(); ++q) {
      c.group_length_scales.push_back(
          r.array("kernel.group_length_scales_" + std::to_string(q + 1)));
    }
    if (r.has("kernel.truth_length_scales") || r.has("kernel.truth_signal_variance")) {
      FixedKernelConfig fixed;
      fixed.truth_length_scales = r.array("kernel.truth_length_scales");
      fixed.truth_signal_variance = r.number("kernel.truth_signal_variance", 1.0);
      fixed.discrepancy_signal_variances = r.array("kernel.discrepancy_signal_variances");
      for (std::size_t l = 0; l < fixed.discrepancy_signal_variances.size(); ++l) {
        fixed.discrepancy_length_scales.push_back(
            r.array("kernel.discrepancy_length_scales_" + std::to_string(l + 1)));
      }
      c.fixed_kernel = std::move(fixed);
    }
  }

  c.map_priors = r.boolean("hyper.map", c.map_priors);
  c.initial_points_per_dim = r.number("hyper.initial_points_per_dim", c.initial_points_per_dim);
  c.refit_interval = r.integer("hyper.refit_interval", c.refit_interval);
  c.estimate_cost_noise = r.boolean("hyper.estimate_cost_noise", c.estimate_cost_noise);
  c.noise_estimate_replicates = r.integer("hyper.noise_estimate_replicates", c.noise_estimate_replicates);
  c.fit_restarts = r.integer("hyper.fit_restarts", c.fit_restarts);

  {
    const std::string strategy = r.text("acquisition.strategy", "gradient");
    if (strategy == "gradient") c.strategy = SearchStrategy::MultistartGradient;
    else if (strategy == "enumeration") c.strategy = SearchStrategy::DiscreteEnumeration;
    else throw ConfigError(origin + ": field 'acquisition.strategy' must be gradient or enumeration");
  }
  c.num_candidates = r.integer("acquisition.num_candidates", c.num_candidates);
  c.resample_candidates = r.boolean("acquisition.resample_candidates", c.resample_candidates);
  c.restarts = r.integer("acquisition.restarts", c.restarts);
  c.fd_step_frac = r.number("acquisition.fd_step_frac", c.fd_step_frac);
  c.h_workers = r.integer("acquisition.workers", c.h_workers);

  {
    const std::string mode = r.text("budget.mode", "cost");
    if (mode == "cost") c.budget_mode = BudgetMode::TotalCost;
    else if (mode == "iterations") c.budget_mode = BudgetMode::Iterations;
    else throw ConfigError(origin + ": field 'budget.mode' must be cost or iterations");
  }
  c.budget = r.number("budget.limit", c.budget);

  c.replications = r.integer("run.replications", c.replications);
  c.seed = static_cast<std::uint64_t>(r.number("run.seed", static_cast<double>(c.seed)));
  c.output_dir = r.text("run.output_dir", c.output_dir);
  c.jobs = r.integer("run.jobs", c.jobs);

  r.reject_unknown();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_values(parse_config_file(path), path);
}

void RunConfig::validate() const {
  if (replications < 1) throw ConfigError("field 'run.replications' must be at least 1");
  if (!(budget > 0.0)) throw ConfigError("field 'budget.limit' must be positive");
  if (initial_points_per_dim <= 0.0) {
    throw ConfigError("field 'hyper.initial_points_per_dim' must be positive");
  }
  if (num_candidates < 0) throw ConfigError("field 'acquisition.num_candidates' must be nonnegative");
  if (restarts < 1) throw ConfigError("field 'acquisition.restarts' must be at least 1");
  if (h_workers < 1) throw ConfigError("field 'acquisition.workers' must be at least 1");
  if (jobs < 1) throw ConfigError("field 'run.jobs' must be at least 1");
  if (refit_interval < 0) throw ConfigError("field 'hyper.refit_interval' must be nonnegative");
  if (problem == "custom" && custom_file.empty()) {
    throw ConfigError("field 'problem.file' is required when problem.name = custom");
  }
  if (problem == "two_source_analytic" && dimension < 1) {
    throw ConfigError("field 'problem.dimension' must be positive");
  }
}

std::string config_digest(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << c.problem << '|' << c.custom_file << '|' << c.dimension << '|' << c.problem_seed << '|'
      << to_string(c.kernel_family) << '|' << c.map_priors << '|' << c.initial_points_per_dim
      << '|' << c.refit_interval << '|' << c.estimate_cost_noise << '|'
      << c.noise_estimate_replicates << '|' << c.fit_restarts << '|'
      << static_cast<int>(c.strategy) << '|' << c.num_candidates << '|' << c.resample_candidates
      << '|' << c.restarts << '|' << c.fd_step_frac << '|' << c.h_workers << '|'
      << static_cast<int>(c.budget_mode) << '|' << c.budget;
  for (double f : c.fidelity) out << ",f" << f;
  for (int g : c.groups) out << ",g" << g;
  return out.str();
}

}  // namespace misobo
