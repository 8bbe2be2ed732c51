#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hardylab/linalg.hpp"
#include "hardylab/operator.hpp"

namespace hardylab {

/// One refinement level of a study: (h, value, residual, iterations).
struct LevelRow {
  double h = 0.0;
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

struct HardyReport {
  double mu_h = 0.0;  ///< smallest eigenvalue of K u = mu W u
  Vec eigvec;
  double h = 0.0;
  double target = 0.0;  ///< lambda(N)
  double residual = 0.0;
  int iterations = 0;
  std::vector<LevelRow> refinement_series;
};

struct ConstantReport {
  std::string id;  ///< "oeq3", "tu8" or "tuu8(eps)"
  double value = 0.0;
  Vec eigvec;
  double h = 0.0;
  double residual = 0.0;
  int iterations = 0;
  int clamped_points = 0;
  std::vector<LevelRow> refinement_series;
};

/// Smallest eigenvalue of the pencil (K, W).
HardyReport hardy_constant(const OperatorSet& ops, const EigenOptions& options = {});

/// Smallest eigenvalue of (K - lambda(N) W, W_log); the log remainder
/// constant, expected >= 1/4.
ConstantReport improved_hardy_check(const OperatorSet& ops, const EigenOptions& options = {});

/// Largest eigenvalue of (K_w - R^e (K - lambda(N) W), M), with K_w = K_x2 and
/// e = 2 when eps is absent, K_w = K_eps(eps) and e = eps otherwise.
ConstantReport tu8_constant(const OperatorSet& ops, std::optional<double> eps = std::nullopt,
                            const EigenOptions& options = {});

/// Runs `level` on `coarse` and on `levels - 1` nested refinements of it.
using LevelFn = std::function<LevelRow(const OperatorSet&)>;
std::vector<LevelRow> refinement_series(const Mesh& coarse, int levels, const LevelFn& level,
                                        const AssemblyOptions& assembly = {});

/// Convenience wrappers that fill the report's refinement_series.
HardyReport hardy_study(const Mesh& coarse, int levels, const AssemblyOptions& assembly = {},
                        const EigenOptions& options = {});
ConstantReport improved_hardy_study(const Mesh& coarse, int levels, const AssemblyOptions& assembly = {},
                                    const EigenOptions& options = {});
ConstantReport tu8_study(const Mesh& coarse, int levels, std::optional<double> eps,
                         const AssemblyOptions& assembly = {}, const EigenOptions& options = {});

}  // namespace hardylab
