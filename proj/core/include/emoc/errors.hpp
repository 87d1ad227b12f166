#pragma once

#include <stdexcept>
#include <string>

namespace emoc {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid user input or violated call precondition (bad degree, unknown
// config key, marked ID out of range, nonpositive coefficient, ...).
// The CLI maps this to a usage failure (exit code 2).
struct InputError : Error {
  explicit InputError(const std::string& msg) : Error(msg) {}
};

// Degenerate or inconsistent geometry (zero-volume tet, evaluation on a
// singular axis, ...).
struct GeometryError : Error {
  explicit GeometryError(const std::string& msg) : Error(msg) {}
};

// Structural numerical failure (matrix not SPD, refinement closure does
// not terminate, ...).  Non-convergence within an iteration budget is
// reported through flags instead, not through this exception.
struct SolverError : Error {
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

// Requested operation needs data the caller did not supply (e.g. exact
// errors without an exact solution).
struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

} // namespace emoc
