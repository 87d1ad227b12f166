#include "emoc/linsolve.hpp"

#include <cmath>

#include "emoc/errors.hpp"

namespace emoc {

std::pair<VecX, SolveReport> pcg_solve(const SpMat& A, const VecX& b,
                                       double tol, int max_iter,
                                       const VecX* x0) {
  const auto n = A.rows();
  if (A.cols() != n || b.size() != n)
    throw InputError("pcg_solve: dimension mismatch");
  if (max_iter < 0) max_iter = static_cast<int>(10 * n);

  VecX diag = A.diagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0))
      throw SolverError("pcg_solve: nonpositive diagonal entry (not SPD)");
  }
  VecX inv_diag = diag.cwiseInverse();

  SolveReport rep;
  double bnorm = b.norm();
  if (bnorm == 0.0) {
    rep.converged = true;
    return {VecX::Zero(n), rep};
  }

  VecX x = x0 ? *x0 : VecX::Zero(n);
  VecX r = b - A * x;
  VecX z = inv_diag.cwiseProduct(r);
  VecX p = z;
  double rz = r.dot(z);
  double rnorm = r.norm();

  int it = 0;
  while (rnorm > tol * bnorm && it < max_iter) {
    VecX Ap = A * p;
    double curv = p.dot(Ap);
    if (!(curv > 0.0))
      throw SolverError("pcg_solve: nonpositive curvature (matrix not SPD)");
    double alpha = rz / curv;
    x += alpha * p;
    r -= alpha * Ap;
    z = inv_diag.cwiseProduct(r);
    double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
    rnorm = r.norm();
    ++it;
  }

  rep.iterations = it;
  rep.rel_residual = rnorm / bnorm;
  rep.converged = rnorm <= tol * bnorm;
  return {x, rep};
}

} // namespace emoc
