#include "hardylab/linalg.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hardylab/kernels.hpp"

namespace hardylab {

SpdFactor::SpdFactor(const SpMat& A) : n_(A.rows()) {
  ldlt_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
  ldlt_->compute(A);
  ok_ = ldlt_->info() == Eigen::Success;
  positive_ = ok_ && (ldlt_->vectorD().array() > 0.0).all();
}

Vec SpdFactor::solve(const Vec& b) const {
  if (!ok_) throw std::runtime_error("SpdFactor: factorization failed");
  return ldlt_->solve(b);
}

CgResult pcg(const SpMat& A, const Vec& b, const CgOptions& options, const Vec* x0) {
  const Exec ex = options.exec;
  const Eigen::Index n = b.size();
  CgResult res;
  res.x = x0 ? *x0 : Vec::Zero(n);
  const double bnorm = std::sqrt(dot(b, b, ex));
  if (bnorm == 0.0) {
    res.x.setZero();
    res.history.push_back(0.0);
    return res;
  }
  Vec dinv = Vec::Ones(n);
  if (options.jacobi) dinv = A.diagonal().cwiseInverse();

  Vec r, ap;
  symv(A, res.x, r, ex);
  r = b - r;
  Vec z = dinv.cwiseProduct(r);
  Vec p = z;
  double rz = dot(r, z, ex);
  double rel = std::sqrt(dot(r, r, ex)) / bnorm;
  res.history.push_back(rel);
  while (rel > options.tol) {
    if (res.iterations >= options.max_iter) {
      std::ostringstream os;
      os << "pcg: no convergence after " << res.iterations << " iterations, relative residual " << rel;
      throw ConvergenceError(os.str(), res.history);
    }
    symv(A, p, ap, ex);
    const double alpha = rz / dot(p, ap, ex);
    res.x += alpha * p;
    r -= alpha * ap;
    z = dinv.cwiseProduct(r);
    const double rz_new = dot(r, z, ex);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
    rel = std::sqrt(dot(r, r, ex)) / bnorm;
    ++res.iterations;
    res.history.push_back(rel);
  }
  res.relative_residual = rel;
  return res;
}

namespace {

Vec start_vector(Eigen::Index n) {
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::sin(1.7 * static_cast<double>(i) + 0.3);
  return x;
}

/// Restarted Lanczos on T = S^{-1} B, self-adjoint in the B inner product.
/// The eigenvalue of the pencil nearest the shift is sigma + sign / theta_max.
EigenPair shift_invert_lanczos(const SpMat& A, const SpMat& B, const SpdFactor& S, double sigma, double sign,
                               const EigenOptions& opt, Vec x) {
  const Eigen::Index n = A.rows();
  const int k_max = static_cast<int>(std::min<Eigen::Index>(opt.krylov_dim, n));
  EigenPair out;
  DenseMat Q(n, k_max + 1);
  DenseMat BQ(n, k_max + 1);
  std::vector<double> last_res;
  while (out.iterations < opt.max_iter) {
    Vec bx = B * x;
    const double nx = std::sqrt(x.dot(bx));
    Q.col(0) = x / nx;
    BQ.col(0) = bx / nx;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(k_max);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k_max);
    int k = 0;
    for (; k < k_max; ++k) {
      Vec w = S.solve(BQ.col(k));
      alpha[k] = BQ.col(k).dot(w);
      // full reorthogonalization in the B inner product, applied twice
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = BQ.leftCols(k + 1).transpose() * w;
        w -= Q.leftCols(k + 1) * c;
      }
      ++out.iterations;
      const Vec bw = B * w;
      const double nw = std::sqrt(std::max(0.0, w.dot(bw)));
      beta[k] = nw;
      if (nw <= 1e-14 * std::abs(alpha[k]) || k + 1 == k_max) {
        ++k;
        break;
      }
      Q.col(k + 1) = w / nw;
      BQ.col(k + 1) = bw / nw;
    }
    DenseMat T = DenseMat::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<DenseMat> es(T);
    const double theta = es.eigenvalues()[k - 1];
    Vec y = Q.leftCols(k) * es.eigenvectors().col(k - 1);
    const Vec by = B * y;
    y /= std::sqrt(y.dot(by));
    const double mu = sigma + sign / theta;
    const Vec ay = A * y;
    const double res = (ay - mu * (B * y)).norm() / ay.norm();
    out.value = mu;
    out.vector = y;
    out.residual = res;
    if (res <= opt.tol) return out;
    last_res.push_back(res);
    x = y;
  }
  std::ostringstream os;
  os << "eigensolver stagnated after " << out.iterations << " iterations, residual " << out.residual
     << ", last value " << out.value;
  throw ConvergenceError(os.str(), last_res);
}

}  // namespace

EigenPair smallest_eigenpair(const SpMat& A, const SpMat& B, const EigenOptions& options) {
  SpMat S = A - options.shift * B;
  SpdFactor f(S);
  if (!f.positive_definite()) {
    throw std::runtime_error("smallest_eigenpair: A - shift B is not positive definite");
  }
  return shift_invert_lanczos(A, B, f, options.shift, 1.0, options, start_vector(A.rows()));
}

EigenPair largest_eigenpair(const SpMat& A, const SpMat& B, const EigenOptions& options) {
  // crude scale for the initial shift: largest diagonal ratio
  double sigma = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) sigma = std::max(sigma, A.coeff(i, i) / B.coeff(i, i));
  sigma = std::max(1.0, sigma);
  SpdFactor f;
  for (int attempt = 0;; ++attempt) {
    f = SpdFactor(SpMat(sigma * B - A));
    if (f.positive_definite()) break;
    if (attempt > 200) throw std::runtime_error("largest_eigenpair: no shift above the spectrum found");
    sigma = 2.0 * sigma + 1.0;
  }
  EigenOptions coarse = options;
  coarse.tol = std::max(options.tol, 1e-4);
  EigenPair pass = shift_invert_lanczos(A, B, f, sigma, -1.0, coarse, start_vector(A.rows()));
  int used = pass.iterations;

  // move the shift just above the estimate; the pencil must stay definite
  double gap = std::max(1e-3 * std::abs(pass.value), 1e-6);
  for (int attempt = 0; attempt < 60; ++attempt) {
    const double s = pass.value + gap;
    if (s >= sigma) break;
    SpdFactor g(SpMat(s * B - A));
    if (g.positive_definite()) {
      sigma = s;
      f = g;
      break;
    }
    gap *= 4.0;
  }
  EigenPair fine = shift_invert_lanczos(A, B, f, sigma, -1.0, options, pass.vector);
  fine.iterations += used;
  return fine;
}

Modes lowest_modes(const SpMat& A, const SpMat& B, int count) {
  const DenseMat Ad(A);
  const DenseMat Bd(B);
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMat> es(Ad, Bd);
  if (es.info() != Eigen::Success) throw std::runtime_error("lowest_modes: dense eigensolver failed");
  count = std::min<int>(count, static_cast<int>(A.rows()));
  return {es.eigenvalues().head(count), es.eigenvectors().leftCols(count)};
}

}  // namespace hardylab
