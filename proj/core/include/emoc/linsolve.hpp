#pragma once

// Preconditioned conjugate gradients for symmetric positive definite
// sparse systems, with a diagonal (Jacobi) preconditioner.

#include <utility>

#include "emoc/types.hpp"

namespace emoc {

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0.0; // ||b - A x|| / ||b||
  bool converged = false;
};

// Solves A x = b to relative residual `tol` (default 1e-10), starting from
// x0 when given.  max_iter < 0 means 10 n.  Detecting negative curvature
// (matrix not SPD) throws SolverError; running out of iterations is
// reported through the flag, not an exception.
std::pair<VecX, SolveReport> pcg_solve(const SpMat& A, const VecX& b,
                                       double tol = 1e-10, int max_iter = -1,
                                       const VecX* x0 = nullptr);

} // namespace emoc
