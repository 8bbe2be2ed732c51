#include "hardylab/spectral.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hardylab {

HardyReport hardy_constant(const OperatorSet& ops, const EigenOptions& options) {
  const EigenPair e = smallest_eigenpair(ops.K, ops.W, options);
  HardyReport r;
  r.mu_h = e.value;
  r.eigvec = e.vector;
  r.h = ops.mesh().h;
  r.target = ops.lambda_N;
  r.residual = e.residual;
  r.iterations = e.iterations;
  if (!(r.mu_h > r.target)) {
    std::ostringstream os;
    os << "discrete Hardy quotient " << r.mu_h << " does not exceed lambda(N) = " << r.target;
    throw std::runtime_error(os.str());
  }
  return r;
}

ConstantReport improved_hardy_check(const OperatorSet& ops, const EigenOptions& options) {
  const SpMat A = ops.hardy_matrix(ops.lambda_N);
  if (!SpdFactor(A).positive_definite()) {
    throw std::runtime_error("improved_hardy_check: K - lambda(N) W is not positive definite");
  }
  const EigenPair e = smallest_eigenpair(A, ops.W_log, options);
  ConstantReport r;
  r.id = "oeq3";
  r.value = e.value;
  r.eigvec = e.vector;
  r.h = ops.mesh().h;
  r.residual = e.residual;
  r.iterations = e.iterations;
  r.clamped_points = ops.clamped_points;
  return r;
}

ConstantReport tu8_constant(const OperatorSet& ops, std::optional<double> eps, const EigenOptions& options) {
  const double e = eps.value_or(2.0);
  if (!(e > 0.0)) throw std::invalid_argument("tu8_constant: eps must be positive");
  const double R = ops.mesh().domain.R_Omega;
  // exponent 2 takes the dedicated |x|^2 matrix; every other exponent the cached K_eps
  const SpMat& Kw = (e == 2.0) ? ops.K_x2 : ops.K_eps(e);
  SpMat A = Kw - std::pow(R, e) * ops.hardy_matrix(ops.lambda_N);
  A.makeCompressed();
  const EigenPair p = largest_eigenpair(A, ops.M, options);
  ConstantReport r;
  std::ostringstream id;
  if (e == 2.0) id << "tu8";
  else id << "tuu8(" << e << ")";
  r.id = id.str();
  r.value = p.value;
  r.eigvec = p.vector;
  r.h = ops.mesh().h;
  r.residual = p.residual;
  r.iterations = p.iterations;
  return r;
}

std::vector<LevelRow> refinement_series(const Mesh& coarse, int levels, const LevelFn& level,
                                        const AssemblyOptions& assembly) {
  if (levels < 1) throw std::invalid_argument("refinement_series: levels must be >= 1");
  std::vector<LevelRow> rows;
  Mesh m = coarse;
  for (int l = 0; l < levels; ++l) {
    if (l > 0) m = refine_nested(m);
    const OperatorSet ops = assemble(m, assembly);
    rows.push_back(level(ops));
  }
  return rows;
}

HardyReport hardy_study(const Mesh& coarse, int levels, const AssemblyOptions& assembly,
                        const EigenOptions& options) {
  HardyReport last;
  auto rows = refinement_series(
      coarse, levels,
      [&](const OperatorSet& ops) {
        last = hardy_constant(ops, options);
        return LevelRow{last.h, last.mu_h, last.residual, last.iterations};
      },
      assembly);
  last.refinement_series = std::move(rows);
  return last;
}

ConstantReport improved_hardy_study(const Mesh& coarse, int levels, const AssemblyOptions& assembly,
                                    const EigenOptions& options) {
  ConstantReport last;
  auto rows = refinement_series(
      coarse, levels,
      [&](const OperatorSet& ops) {
        last = improved_hardy_check(ops, options);
        return LevelRow{last.h, last.value, last.residual, last.iterations};
      },
      assembly);
  last.refinement_series = std::move(rows);
  return last;
}

ConstantReport tu8_study(const Mesh& coarse, int levels, std::optional<double> eps,
                         const AssemblyOptions& assembly, const EigenOptions& options) {
  ConstantReport last;
  auto rows = refinement_series(
      coarse, levels,
      [&](const OperatorSet& ops) {
        last = tu8_constant(ops, eps, options);
        return LevelRow{last.h, last.value, last.residual, last.iterations};
      },
      assembly);
  last.refinement_series = std::move(rows);
  return last;
}

}  // namespace hardylab
