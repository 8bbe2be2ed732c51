#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "hardylab/types.hpp"

namespace hardylab {

/// Iterative method that stopped before reaching its tolerance. Carries the
/// residual history for diagnosis.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, std::vector<double> hist)
      : std::runtime_error(what), history(std::move(hist)) {}
  std::vector<double> history;
};

/// Sparse LDL^T factorization of a symmetric matrix.
class SpdFactor {
 public:
  SpdFactor() = default;
  explicit SpdFactor(const SpMat& A);

  /// True when the factorization succeeded with strictly positive pivots.
  [[nodiscard]] bool positive_definite() const { return ok_ && positive_; }
  [[nodiscard]] Vec solve(const Vec& b) const;
  [[nodiscard]] Eigen::Index size() const { return n_; }

 private:
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;
  Eigen::Index n_ = 0;
  bool ok_ = false;
  bool positive_ = false;
};

struct CgOptions {
  double tol = 1e-10;  ///< relative residual ||b - A x|| / ||b||
  int max_iter = 20000;
  bool jacobi = true;
  Exec exec = Exec::parallel;
};

struct CgResult {
  Vec x;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;  ///< relative residual per iteration, starting at iteration 0
};

/// Preconditioned conjugate gradient for symmetric positive definite A.
/// Throws ConvergenceError after max_iter iterations.
CgResult pcg(const SpMat& A, const Vec& b, const CgOptions& options = {}, const Vec* x0 = nullptr);

struct EigenOptions {
  double tol = 1e-8;  ///< ||A u - mu B u|| <= tol ||A u||
  int max_iter = 5000;
  int krylov_dim = 40;
  double shift = 0.0;  ///< for the smallest eigenpair: A - shift B must be SPD
};

struct EigenPair {
  double value = 0.0;
  Vec vector;  ///< B-normalized
  double residual = 0.0;
  int iterations = 0;
};

/// Smallest eigenvalue of the symmetric-definite pencil A u = mu B u, with B
/// SPD and A - shift B SPD. Shift-invert Lanczos on (A - shift B)^{-1} B.
EigenPair smallest_eigenpair(const SpMat& A, const SpMat& B, const EigenOptions& options = {});

/// Largest eigenvalue of A u = mu B u, with B SPD and A only symmetric. The
/// shift is raised until sigma B - A factors with positive pivots (so sigma
/// lies above the spectrum), then the shift-invert iteration runs from there.
EigenPair largest_eigenpair(const SpMat& A, const SpMat& B, const EigenOptions& options = {});

/// Lowest `count` eigenpairs of A u = mu B u by a dense solve; columns are
/// B-orthonormal, values ascending.
struct Modes {
  Vec values;
  DenseMat vectors;
};
Modes lowest_modes(const SpMat& A, const SpMat& B, int count);

}  // namespace hardylab
