#pragma once

// The adaptive SOLVE -> ESTIMATE -> MARK -> REFINE loop, the uniform
// reference loop, exact-error evaluation, convergence bookkeeping, CSV
// output and log-log rate fits.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "emoc/control.hpp"
#include "emoc/estimator.hpp"
#include "emoc/problems.hpp"

namespace emoc {

struct AdaptiveConfig {
  double theta = 0.5;              // bulk-chasing parameter
  std::string marking = "doerfler"; // or "maximum"
  double gamma = 0.5;              // threshold of the maximum strategy
  int max_iterations = 100;
  long max_dofs = 50000;           // stop once state DOFs exceed this
  double eta_tol = 0.0;            // stop once eta_hat drops below this
  double cg_tol = 1e-10;
  double pg_tol = 1e-8;
  int pg_max_outer = 200;
  int subdivisions = 0;            // 0: problem default
  bool uniform = false;            // mark everything, three sweeps per step
  unsigned seed = 0;               // recorded for reproducibility checks
};

struct ConvergenceRecord {
  int iter = 0;
  long dofs_state = 0;
  long dofs_control = 0;
  double eta_hat = 0.0;     // sqrt of the total marked quantity
  double eta_hat_max = 0.0; // largest per-element value (not squared)
  double err_y = 0.0;
  double err_p = 0.0;
  double err_u = 0.0;
  double err_total = 0.0;   // err_y + err_p + err_u
  double effectivity = 0.0; // eta_hat / err_total
  double objective = 0.0;
  int pg_iters = 0;
  double seconds = 0.0;

  // Extra diagnostics (not part of the CSV contract).
  long n_tets = 0;
  int marked_count = 0;
  double marked_near_interface_fraction = -1.0; // <0: not applicable
  double shape_ratio = 0.0;
};

struct ExactErrors {
  double err_y = 0.0; // H(curl) distance of y_h to y*
  double err_p = 0.0; // H(curl) distance of p_h to p*
  double err_u = 0.0; // L2 distance of u_h to u*
};

// Throws UnsupportedError when the problem has no exact solution.  For a
// problem with a spherical interface the control error on cut elements
// integrates the two-sided exact control by recursive octasection.
ExactErrors exact_errors(const LevelAssets& assets, const KKTSolution& kkt);

// Called after each completed level.
using LevelCallback = std::function<void(
    const ConvergenceRecord&, const TetMesh&, const LevelAssets&,
    const KKTSolution&, const IndicatorReport&)>;

std::vector<ConvergenceRecord> run_adaptive(const ProblemSpec& problem,
                                            const AdaptiveConfig& config,
                                            const LevelCallback& callback = {});

// Uniform reference: every element marked, three bisection sweeps per
// iteration (one full refinement of each tet).
std::vector<ConvergenceRecord> run_uniform(const ProblemSpec& problem,
                                           const AdaptiveConfig& config,
                                           const LevelCallback& callback = {});

// Least-squares slope of log10(value) against log10(dofs_state) over the
// trailing `window` records with positive value (default 6); NaN when
// fewer than two usable points exist.
double fit_slope(const std::vector<ConvergenceRecord>& records,
                 const std::function<double(const ConvergenceRecord&)>& value,
                 int window = 6);

// CSV with the fixed header row; floats at 12 significant digits.
void write_csv(const std::vector<ConvergenceRecord>& records, std::ostream& os);
void write_csv(const std::vector<ConvergenceRecord>& records,
               const std::string& path);

} // namespace emoc
