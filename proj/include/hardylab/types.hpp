#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hardylab {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using DenseMat = Eigen::MatrixXd;
/// Column-major sparse matrix. Every square operator in the library is
/// symmetric, so column k doubles as row k.
using SpMat = Eigen::SparseMatrix<double>;
using RowSpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Complex = std::complex<double>;

/// Execution policy for the data-parallel kernels. `serial` is the plain
/// reference loop kept for testing; `parallel` uses OpenMP with a fixed block
/// decomposition, so its result does not depend on the thread count.
enum class Exec { serial, parallel };

}  // namespace hardylab
