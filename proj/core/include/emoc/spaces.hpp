#pragma once

// Lowest-order edge-element space with tangential-trace handling, the
// element-wise constant control space, interpolation and L2 projections.
//
// One degree of freedom per interior mesh edge; boundary edges are
// constrained (eliminated from linear systems) and carry their values in a
// separate slot vector so inhomogeneous tangential data can be lifted.
// The global direction of an edge runs from its lower to its higher vertex
// index; per-element signs reconcile local and global directions.  Local
// fields have the form a x X + b: the span of the six Whitney functions
// phi_{ab} = lambda_a grad(lambda_b) - lambda_b grad(lambda_a).

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "emoc/mesh.hpp"
#include "emoc/types.hpp"

namespace emoc {

struct DofMap {
  std::vector<int> edge_dof;   // per global edge: state DOF id, or -1
  std::vector<int> edge_bslot; // per global edge: boundary slot id, or -1
  std::vector<std::array<std::int8_t, 6>> sign; // per (tet, local edge)
  int n_state = 0;
  int n_boundary = 0;
};

// Interior edges get DOFs; edges of boundary faces are constrained.
DofMap build_dofmap(const TetMesh& mesh);

// Coefficients over the state space plus values on constrained edges
// (all zero for homogeneous problems).
struct EdgeField {
  VecX coeffs;
  VecX boundary_values;
};

EdgeField zero_edge_field(const DofMap& dofmap);

// One constant 3-vector per tet.
struct P0Field {
  std::vector<Vec3> values;
};

P0Field zero_p0_field(const TetMesh& mesh);

// Constant barycentric gradients and basis curls of one tet.  Basis
// function e spans local edge kTetEdges[e] and has unit tangential line
// integral along it (in local direction), zero along all other edges.
struct WhitneyBasis {
  std::array<Vec3, 4> grad_lambda;
  std::array<Vec3, 6> curl; // 2 grad(lambda_a) x grad(lambda_b), constant
};

// Throws GeometryError on a degenerate tet.
WhitneyBasis whitney_basis(const std::array<Vec3, 4>& corners);

// Barycentric coordinates of x in the tet with the given corners/basis.
std::array<double, 4> barycentric(const std::array<Vec3, 4>& corners,
                                  const WhitneyBasis& wb, const Vec3& x);

// Value of local basis function e at barycentric point l.
Vec3 whitney_value(const WhitneyBasis& wb, int e, const std::array<double, 4>& l);

// Signed local coefficients of the field on tet t (interior DOFs and
// boundary values combined), ready for basis expansion.
std::array<double, 6> local_coefficients(const TetMesh& mesh,
                                         const DofMap& dofmap,
                                         const EdgeField& field, int t);

// Field / curl evaluation on one tet.
Vec3 eval_edge_field(const TetMesh& mesh, const DofMap& dofmap,
                     const EdgeField& field, int t, const Vec3& x);
Vec3 eval_curl(const TetMesh& mesh, const DofMap& dofmap,
               const EdgeField& field, int t);

// Edge interpolation: DOF on edge e equals the tangential line integral of
// g along e (2-point Gauss), filling interior coefficients and boundary
// values.  Reproduces any global field a x X + b exactly.
EdgeField edge_interpolate(const std::function<Vec3(const Vec3&)>& g,
                           const TetMesh& mesh, const DofMap& dofmap);

// Lifting variant: boundary values only, interior coefficients zero.
EdgeField edge_interpolate_boundary(const std::function<Vec3(const Vec3&)>& g,
                                    const TetMesh& mesh, const DofMap& dofmap);

// Element-wise L2 projection onto constants: (1/|T|) int_T v dx by
// quadrature of the requested degree (per-tet degrees supported).
P0Field project_p0(const std::function<Vec3(const Vec3&)>& v,
                   const TetMesh& mesh, int degree);
P0Field project_p0(const std::function<Vec3(const Vec3&)>& v,
                   const TetMesh& mesh, const std::vector<int>& degree);

// Exact projection of an edge-element field (its restriction is linear).
P0Field project_p0(const TetMesh& mesh, const DofMap& dofmap,
                   const EdgeField& field);

// Componentwise max(0, v): the projection onto the admissible set.
P0Field project_admissible(const P0Field& v);

// L2 inner product and norm of element-wise constant fields.
double p0_dot(const TetMesh& mesh, const P0Field& a, const P0Field& b);
double p0_norm(const TetMesh& mesh, const P0Field& a);

} // namespace emoc
