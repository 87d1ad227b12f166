#pragma once

// Flat key = value run configuration with documented defaults.

#include <string>

#include "emoc/driver.hpp"

namespace emoc {

struct RunConfig {
  std::string problem = "lshape"; // lshape | inclusion
  std::string mode = "adaptive";  // adaptive | uniform
  double theta = 0.5;
  double alpha = -1.0; // < 0: keep the problem default
  std::string marking = "doerfler";
  double gamma = 0.5;
  int max_iters = 100;
  long max_dofs = 50000;
  double eta_tol = 0.0;
  double cg_tol = 1e-10;
  double pg_tol = 1e-8;
  int pg_max_outer = 200;
  int subdivisions = 0; // 0: problem default
  int quad_degree = 4;
  int quad_degree_singular = 5;
  std::string output_dir = "out";
  unsigned seed = 0;
};

// Parses "key = value" lines ('#' starts a comment; blank lines ignored).
// Unknown keys raise InputError listing the valid keys; out-of-range
// values (e.g. theta outside (0,1)) raise InputError.
RunConfig parse_config(const std::string& text);

// Range checks on a fully-populated configuration (also run by
// parse_config); raises InputError on violations.
void validate_config(const RunConfig& config);

// The ProblemSpec selected by config.problem with the alpha/quadrature
// overrides applied; unknown names raise InputError.
ProblemSpec resolve_problem(const RunConfig& config);

// The driver configuration corresponding to the run options.
AdaptiveConfig to_adaptive_config(const RunConfig& config);

} // namespace emoc
