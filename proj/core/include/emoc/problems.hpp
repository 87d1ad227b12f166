#pragma once

// Problem definitions: coefficients, data fields, boundary data and (when
// known) the exact solution triplet, plus the two built-in benchmarks.
//
// Data callables take (point, subdomain label).  Volume integrals evaluate
// them with the *geometric* label classify(x) so the data does not depend
// on how well the current mesh resolves an interface; face-jump terms in
// the estimator evaluate per side with the element labels.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "emoc/assembly.hpp"
#include "emoc/mesh.hpp"
#include "emoc/types.hpp"

namespace emoc {

// A spherical material interface (used for labeling, refinement
// diagnostics and exact control errors on cut elements).  Convention:
// label 2 inside the ball, label 1 outside.
struct BallInterface {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct ProblemSpec {
  std::string name;

  std::function<TetMesh(int)> build_mesh;
  int default_subdivisions = 2;

  // Entry l-1 holds the constants of subdomain l.
  std::vector<double> mu_inv_by_label;
  std::vector<double> sigma_by_label;
  // Geometric subdomain label of a point (>= 1).
  std::function<int(const Vec3&)> classify;

  BranchField f;        // forcing
  BranchScalar div_f;   // its divergence, per subdomain
  BranchField u_d;      // desired control
  BranchField y_d;      // desired curl field
  BranchField curl_y_d; // curl of y_d, per subdomain

  double alpha = 0.1;

  // Tangential boundary data; empty for homogeneous problems.
  std::function<Vec3(const Vec3&)> lifting_g;

  bool has_exact = false;
  std::function<Vec3(const Vec3&)> y_star, curl_y_star, p_star, curl_p_star;
  // Exact control; takes the geometric label so both one-sided values are
  // recoverable on cut elements.  When interface_ball is set, u_star must
  // be constant on each side of the sphere (indicator-function data).
  BranchField u_star;

  std::optional<BallInterface> interface_ball;

  // Flags elements needing the elevated quadrature degree.
  std::function<bool(const TetMesh&, int)> needs_high_degree;
  int quad_degree = 4;
  int quad_degree_singular = 5;
};

// Per-tet volume quadrature degrees for the given mesh.
std::vector<int> quad_degrees(const ProblemSpec& problem, const TetMesh& mesh);

// Builds the initial mesh and applies the geometric labeling.
TetMesh build_problem_mesh(const ProblemSpec& problem, int subdivisions);

// Volume-evaluation wrappers binding the geometric label.
std::function<Vec3(const Vec3&)> bind_geometric(const ProblemSpec& problem,
                                                const BranchField& field);

// Fraction of the tet inside the ball, by recursive octasection (red
// refinement into eight equal-volume children); exact once a sub-tet lies
// fully inside or outside, centroid rule at the leaves.
double ball_volume_fraction(const BallInterface& ball,
                            const std::array<Vec3, 4>& corners, int depth = 6);

// L-shape benchmark: mu = sigma = 1, y_d = u_d = 0, alpha = 0.1,
// f = y* = grad(r^(2/3) sin(2 theta / 3)) with the wedge angle measured
// from the reentrant face, inhomogeneous boundary data g = y*, exact
// triplet (y*, 0, 0).  The gradient field is singular on the axis
// x = y = 0; evaluating the exact solution there throws GeometryError.
ProblemSpec benchmark_lshape();

// High-contrast inclusion benchmark on [-1,1]^3: ball of radius 0.6 with
// sigma = 10, mu^{-1} = 0.1 inside (1 outside), u_d = 10(chi,0,0),
// y_d = 0, f = sigma grad(phi) - 10(chi,0,0) for
// phi = sin(2 pi x) sin(2 pi y) sin(2 pi z) / (2 pi); exact triplet
// y* = grad(phi), p* = 0, u* = u_d with homogeneous boundary data.
ProblemSpec benchmark_inclusion();

} // namespace emoc
