#pragma once

// Sparse assembly of the bilinear form
//
//   B(u,v) = (mu^{-1} curl u, curl v) + (sigma u, v)
//
// over the interior edge DOFs, plus load vectors for the state and adjoint
// equations and the elimination of inhomogeneous tangential boundary data
// through a lifting field: the solved field is lifting + interior part, so
// the lifting's B-action moves to the right-hand side.
//
// Coefficients are element-wise constants aligned with the subdomain
// partition.  The curl-curl block is exact (constant curls); the mass
// block uses a degree-2 rule, exact for products of linear fields.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emoc/mesh.hpp"
#include "emoc/spaces.hpp"
#include "emoc/types.hpp"

namespace emoc {

// Data fields take the evaluation point and the subdomain label of the
// element (or element side) they are being evaluated for.
using BranchField = std::function<Vec3(const Vec3&, int)>;
using BranchScalar = std::function<double(const Vec3&, int)>;

// Per-tet positive constants mu^{-1} and sigma.
struct Coefficients {
  std::vector<double> mu_inv;
  std::vector<double> sigma;
};

// Expands per-subdomain constants (label l reads entry l-1) to per-tet
// values; throws InputError on nonpositive values or unknown labels.
Coefficients make_coefficients(const TetMesh& mesh,
                               const std::vector<double>& mu_inv_by_label,
                               const std::vector<double>& sigma_by_label);

// Signed 6x6 element matrix of B on tet t.
Eigen::Matrix<double, 6, 6> local_matrix_B(const TetMesh& mesh,
                                           const DofMap& dofmap,
                                           const Coefficients& coeffs, int t);

// Global sparse matrix over interior DOFs (symmetric positive definite).
SpMat assemble_B(const TetMesh& mesh, const DofMap& dofmap,
                 const Coefficients& coeffs);

// Full-field energy v^T B v including constrained edges (sums the local
// quadratic forms; useful for energy norms of fields with boundary data).
double energy_B(const TetMesh& mesh, const DofMap& dofmap,
                const Coefficients& coeffs, const EdgeField& v);

// State load: entry i = (f + u, phi_i) - B(lifting, phi_i).  `u` and
// `lifting` may be null; `degree` gives the volume quadrature degree per
// tet for the f-term.
VecX assemble_state_rhs(const TetMesh& mesh, const DofMap& dofmap,
                        const Coefficients& coeffs, const BranchField& f,
                        const P0Field* u, const EdgeField* lifting,
                        const std::vector<int>& degree);

// Load of an element-wise constant field alone: entry i = (u, phi_i)
// (closed form: the mean of a Whitney function is known).
VecX assemble_p0_load(const TetMesh& mesh, const DofMap& dofmap,
                      const P0Field& u);

// Adjoint load: entry i = (curl y - y_d, curl phi_i); curls are constant
// per element, y_d is integrated with the given per-tet degree.
VecX assemble_adjoint_rhs(const TetMesh& mesh, const DofMap& dofmap,
                          const EdgeField& y, const BranchField& y_d,
                          const std::vector<int>& degree);

// Coordinate-format Matrix Market dump for external verification.
void write_matrix_market(const SpMat& A, const std::string& path);

} // namespace emoc
