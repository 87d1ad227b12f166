#pragma once

// Optimal-control layer: per-level assembled operators and the projected
// gradient iteration for the box-constrained control problem
//
//   min  1/2 ||curl y - y_d||^2 + alpha/2 ||u - u_d||^2
//   s.t. B(y, v) = (f + u, v)  for all v,   u >= 0 componentwise.
//
// The first-order system couples the state y, adjoint p (driven by
// curl y - y_d), the control u = max{0, -P_h p / alpha + P_h u_d} and the
// multiplier lambda = P_h p + alpha (u - P_h u_d).

#include <functional>
#include <vector>

#include "emoc/assembly.hpp"
#include "emoc/linsolve.hpp"
#include "emoc/problems.hpp"
#include "emoc/spaces.hpp"
#include "emoc/types.hpp"

namespace emoc {

// Everything fixed once a mesh level is chosen: dof map, coefficients,
// stiffness matrix, boundary lifting and the control-independent part of
// the state load.
struct LevelAssets {
  const TetMesh* mesh = nullptr;
  const ProblemSpec* problem = nullptr;
  DofMap dofmap;
  Coefficients coeffs;
  std::vector<int> qdeg;
  SpMat B;
  EdgeField lifting;     // zero coefficients when no boundary data
  VecX rhs_f;            // (f, v) - B(lifting, v), fixed per level
  P0Field u_hd;          // P_h u_d
  std::vector<double> osc_ud_sq_tet; // per tet ||u_d - P_h u_d||_T^2
  double ud_osc_sq = 0.0; // ||u_d - P_h u_d||^2, the u-independent part of
                          // the control cost (Pythagoras split)
  double cg_tol = 1e-10;
  int cg_max_iter = -1;
};

LevelAssets build_level_assets(const TetMesh& mesh, const ProblemSpec& problem,
                               double cg_tol = 1e-10);

// Solves B y = rhs_f + (u, v).  x0 (interior coefficients) warm-starts CG.
EdgeField solve_state(const LevelAssets& assets, const P0Field& u,
                      SolveReport* report = nullptr, const VecX* x0 = nullptr);

// Solves B w = (d, v) with zero boundary data (the state response to a
// control increment d).
EdgeField solve_response(const LevelAssets& assets, const P0Field& d,
                         SolveReport* report = nullptr,
                         const VecX* x0 = nullptr);

// Solves B p = (curl y - y_d, curl v) with zero boundary data.
EdgeField solve_adjoint(const LevelAssets& assets, const EdgeField& y,
                        SolveReport* report = nullptr,
                        const VecX* x0 = nullptr);

// Tracking functional J(u, y(u)); y must be the state belonging to u.
double objective(const LevelAssets& assets, const P0Field& u,
                 const EdgeField& y);

struct KKTSolution {
  EdgeField y, p;
  P0Field u, lambda;
  double objective = 0.0;
  double fixed_point_residual = 0.0; // ||u - max{0, -P_h p/alpha + u_hd}||
  int outer_iterations = 0;
  bool converged = false;
  long total_cg_iterations = 0;
  std::vector<double> objective_history; // initial J, then each accepted step
};

// Projected gradient with exact line search along the projected path and
// a halving safeguard; stops when the fixed-point residual drops below
// tol * (1 + ||u||).
KKTSolution projected_gradient(const LevelAssets& assets, const P0Field& u0,
                               double tol = 1e-8, int max_outer = 200);

// Default start max{0, u_hd}.
P0Field initial_control(const LevelAssets& assets);

} // namespace emoc
