#include "emoc/config.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

#include "emoc/errors.hpp"

namespace emoc {
namespace {

const std::vector<std::string>& valid_keys() {
  static const std::vector<std::string> keys = {
      "problem",      "mode",        "theta",       "alpha",
      "marking",      "gamma",       "max_iters",   "max_dofs",
      "eta_tol",      "cg_tol",      "pg_tol",      "pg_max_outer",
      "subdivisions", "quad_degree", "quad_degree_singular",
      "output_dir",   "seed",
  };
  return keys;
}

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
    ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
    --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size())
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw InputError("config: key '" + key + "' needs a number, got '" +
                     value + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size())
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw InputError("config: key '" + key + "' needs an integer, got '" +
                     value + "'");
  }
}

void apply(RunConfig& config, const std::string& key,
           const std::string& value) {
  if (key == "problem")
    config.problem = value;
  else if (key == "mode")
    config.mode = value;
  else if (key == "theta")
    config.theta = parse_double(key, value);
  else if (key == "alpha")
    config.alpha = parse_double(key, value);
  else if (key == "marking")
    config.marking = value;
  else if (key == "gamma")
    config.gamma = parse_double(key, value);
  else if (key == "max_iters")
    config.max_iters = static_cast<int>(parse_long(key, value));
  else if (key == "max_dofs")
    config.max_dofs = parse_long(key, value);
  else if (key == "eta_tol")
    config.eta_tol = parse_double(key, value);
  else if (key == "cg_tol")
    config.cg_tol = parse_double(key, value);
  else if (key == "pg_tol")
    config.pg_tol = parse_double(key, value);
  else if (key == "pg_max_outer")
    config.pg_max_outer = static_cast<int>(parse_long(key, value));
  else if (key == "subdivisions")
    config.subdivisions = static_cast<int>(parse_long(key, value));
  else if (key == "quad_degree")
    config.quad_degree = static_cast<int>(parse_long(key, value));
  else if (key == "quad_degree_singular")
    config.quad_degree_singular = static_cast<int>(parse_long(key, value));
  else if (key == "output_dir")
    config.output_dir = value;
  else if (key == "seed")
    config.seed = static_cast<unsigned>(parse_long(key, value));
  else {
    std::string msg = "config: unknown key '" + key + "'; valid keys:";
    for (const auto& k : valid_keys())
      msg += " " + k;
    throw InputError(msg);
  }
}

} // namespace

void validate_config(const RunConfig& config) {
  if (!(config.theta > 0.0) || !(config.theta < 1.0))
    throw InputError("config: theta must lie in (0, 1)");
  if (!(config.gamma > 0.0) || !(config.gamma <= 1.0))
    throw InputError("config: gamma must lie in (0, 1]");
  if (config.mode != "adaptive" && config.mode != "uniform")
    throw InputError("config: mode must be 'adaptive' or 'uniform'");
  if (config.marking != "doerfler" && config.marking != "maximum")
    throw InputError("config: marking must be 'doerfler' or 'maximum'");
  if (config.max_iters < 0)
    throw InputError("config: max_iters must be nonnegative");
  if (config.max_dofs <= 0)
    throw InputError("config: max_dofs must be positive");
  if (config.cg_tol <= 0.0 || config.pg_tol <= 0.0)
    throw InputError("config: solver tolerances must be positive");
  if (config.quad_degree < 1 || config.quad_degree > 5 ||
      config.quad_degree_singular < 1 || config.quad_degree_singular > 5)
    throw InputError("config: quadrature degrees must lie in 1..5");
  // alpha < 0 keeps the problem default; an explicit value must be > 0.
  if (config.alpha == 0.0 || config.alpha != config.alpha)
    throw InputError("config: alpha must be positive");
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(lineno) +
                       ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw InputError("config line " + std::to_string(lineno) +
                       ": empty key or value");
    apply(config, key, value);
  }
  validate_config(config);
  return config;
}

ProblemSpec resolve_problem(const RunConfig& config) {
  ProblemSpec problem;
  if (config.problem == "lshape")
    problem = benchmark_lshape();
  else if (config.problem == "inclusion")
    problem = benchmark_inclusion();
  else
    throw InputError("unknown problem '" + config.problem +
                     "' (valid: lshape, inclusion)");
  if (config.alpha > 0.0)
    problem.alpha = config.alpha;
  problem.quad_degree = config.quad_degree;
  problem.quad_degree_singular = config.quad_degree_singular;
  return problem;
}

AdaptiveConfig to_adaptive_config(const RunConfig& config) {
  AdaptiveConfig ac;
  ac.theta = config.theta;
  ac.marking = config.marking;
  ac.gamma = config.gamma;
  ac.max_iterations = config.max_iters;
  ac.max_dofs = config.max_dofs;
  ac.eta_tol = config.eta_tol;
  ac.cg_tol = config.cg_tol;
  ac.pg_tol = config.pg_tol;
  ac.pg_max_outer = config.pg_max_outer;
  ac.subdivisions = config.subdivisions;
  ac.uniform = config.mode == "uniform";
  ac.seed = config.seed;
  return ac;
}

} // namespace emoc
