#pragma once

#include <string>
#include <vector>

#include "hardylab/linalg.hpp"
#include "hardylab/operator.hpp"
#include "hardylab/report.hpp"

namespace hardylab {

/// Discrete solution of -Laplace u - lambda u/|x|^2 = f, u = 0 on the boundary.
struct EllipticSolution {
  Vec u;
  double lambda = 0.0;
  ScalarField f;
  Vec load;  ///< int f phi_i
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> history;
  double energy = 0.0;  ///< u^T (K - lambda W) u
};

/// CG solve of (K - lambda W) u = int f phi.
EllipticSolution solve(const OperatorSet& ops, double lambda, const ScalarField& f, const CgOptions& options = {});

/// lhs = 1/2 int_Gamma (x.nu) (du/dnu)^2, rhs = -int (x.grad u) f - (N-2)/2 B_lambda[u].
IdentityReport pohozaev_check(const OperatorSet& ops, const EllipticSolution& sol);

/// int_Gamma (du/dnu)^2 |x|^2 / (B_lambda[u] + ||f||^2); 0 when both vanish.
double trace_ratio(const OperatorSet& ops, const EllipticSolution& sol);

/// Loads used by the trace battery: 1, x_N and sin(pi x_N / R_Omega).
std::vector<ScalarField> battery_loads(const DomainSpec& domain);

/// Largest trace ratio over battery_loads at the given lambda.
double trace_battery(const OperatorSet& ops, double lambda, const CgOptions& options = {});

struct ContinuationRow {
  double eps = 0.0;
  double lambda = 0.0;
  double distance = 0.0;  ///< ||u_eps - u_0|| in the B_{lambda(N)} seminorm
  double weighted = 0.0;  ///< eps u_eps^T W u_eps
  int iterations = 0;
};

struct ContinuationTable {
  std::vector<ContinuationRow> rows;
  bool distance_decreasing = true;
  bool weighted_decreasing = true;
  std::vector<std::string> warnings;
};

/// Solves at lambda(N) - eps for each eps and compares with the solution at
/// lambda(N). eps must be non-negative and strictly decreasing; eps = 0 gives
/// the base solution itself.
ContinuationTable lambda_continuation(const OperatorSet& ops, const ScalarField& f, const std::vector<double>& eps_list,
                                      const CgOptions& options = {});

}  // namespace hardylab
