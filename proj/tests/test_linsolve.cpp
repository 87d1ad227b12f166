#include <doctest.h>

#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "emoc/assembly.hpp"
#include "emoc/errors.hpp"
#include "emoc/linsolve.hpp"
#include "emoc/mesh.hpp"
#include "emoc/spaces.hpp"
#include "helpers.hpp"

using namespace emoc;

namespace {

SpMat from_dense(const Eigen::MatrixXd& D) {
  SpMat A(D.rows(), D.cols());
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (Eigen::Index j = 0; j < D.cols(); ++j)
      if (D(i, j) != 0.0) trip.emplace_back(i, j, D(i, j));
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

} // namespace

TEST_SUITE("linsolve") {

TEST_CASE("identity and diagonal systems") {
  SpMat I = from_dense(Eigen::MatrixXd::Identity(3, 3));
  VecX b(3);
  b << 1, -2, 0.5;
  auto [x, rep] = pcg_solve(I, b);
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK((x - b).norm() <= 1e-12);

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 4.0;
  VecX b2(2);
  b2 << 1, 4;
  auto [x2, rep2] = pcg_solve(from_dense(D), b2);
  CHECK(rep2.converged);
  CHECK((x2 - VecX::Ones(2)).norm() <= 1e-12);
}

TEST_CASE("zero right-hand side converges immediately") {
  SpMat I = from_dense(Eigen::MatrixXd::Identity(4, 4));
  auto [x, rep] = pcg_solve(I, VecX::Zero(4));
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  CHECK(x.norm() == 0.0);
}

TEST_CASE("input validation and SPD detection") {
  SpMat I = from_dense(Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(pcg_solve(I, VecX::Zero(3)), InputError);

  Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(2, 2);
  VecX b(2);
  b << 1, 1;
  CHECK_THROWS_AS(pcg_solve(from_dense(neg), b), SolverError);

  Eigen::MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1; // eigenvalues 3 and -1
  VecX b2(2);
  b2 << 1, -1;
  CHECK_THROWS_AS(pcg_solve(from_dense(indef), b2), SolverError);
}

TEST_CASE("agrees with a direct solve on an assembled matrix") {
  TetMesh m = bisect_sweeps(build_lshape_mesh(1), 2).mesh;
  DofMap dm = build_dofmap(m);
  Coefficients c = make_coefficients(m, {1.0}, {2.0});
  SpMat A = assemble_B(m, dm, c);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VecX b(dm.n_state);
  for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = d(rng);

  auto [x, rep] = pcg_solve(A, b, 1e-12);
  CHECK(rep.converged);
  CHECK(rep.rel_residual <= 1e-12);
  VecX direct = Eigen::MatrixXd(A).ldlt().solve(b);
  CHECK((x - direct).norm() <= 1e-8 * direct.norm());
}

TEST_CASE("warm start at the solution needs no iterations") {
  Eigen::MatrixXd D(2, 2);
  D << 4, 1, 1, 3;
  VecX b(2);
  b << 1, 2;
  VecX exact = D.ldlt().solve(b);
  auto [x, rep] = pcg_solve(from_dense(D), b, 1e-10, -1, &exact);
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  CHECK((x - exact).norm() <= 1e-12);
}

TEST_CASE("solution is invariant under symmetric permutation") {
  Eigen::MatrixXd D(3, 3);
  D << 5, 1, 0, 1, 4, 1, 0, 1, 6;
  VecX b(3);
  b << 1, -1, 2;
  Eigen::PermutationMatrix<3> P;
  P.indices() << 2, 0, 1;
  Eigen::MatrixXd PD = P * D * P.transpose();
  VecX Pb = P * b;
  auto [x, rep] = pcg_solve(from_dense(D), b, 1e-13);
  auto [px, prep] = pcg_solve(from_dense(PD), Pb, 1e-13);
  CHECK(rep.converged);
  CHECK(prep.converged);
  CHECK((VecX(P * x) - px).norm() <= 1e-10);
}

TEST_CASE("iteration cap reports failure without throwing") {
  TetMesh m = bisect_sweeps(build_cube_mesh(1), 2).mesh;
  DofMap dm = build_dofmap(m);
  Coefficients c = make_coefficients(m, {1.0}, {1.0});
  SpMat A = assemble_B(m, dm, c);
  VecX b = VecX::Ones(dm.n_state);
  auto [x, rep] = pcg_solve(A, b, 1e-14, 1);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(rep.rel_residual > 1e-14);
}

} // TEST_SUITE
