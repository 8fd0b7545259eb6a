#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hjb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

}  // namespace hjb
