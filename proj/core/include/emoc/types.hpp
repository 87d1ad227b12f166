#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace emoc {

using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
// Row-major so that matrix-vector products in the CG loop stream rows.
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

} // namespace emoc
