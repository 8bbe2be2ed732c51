#pragma once

#include <vector>

#include "hardylab/operator.hpp"
#include "hardylab/report.hpp"

namespace hardylab {

struct SemilinearOptions {
  double tol = 1e-8;  ///< relative change of the quotient between iterations
  double el_tol = 1e-8;  ///< relative Euler-Lagrange residual at the fixed point
  int max_iter = 5000;
  int max_seeds = 3;
};

/// Solution of -Laplace u - lambda u/|x|^2 = |u|^{alpha-1} u with u = 0 on the boundary.
struct SemilinearResult {
  double alpha = 0.0;
  double lambda = 0.0;
  Vec u;                  ///< rescaled solution
  Vec normalized;         ///< minimizer with int |u|^{alpha+1} = 1
  double I_value = 0.0;   ///< infimum of B_lambda[u] / (int |u|^{alpha+1})^{2/(alpha+1)}
  int iterations = 0;
  int seeds_used = 0;
  std::vector<double> quotient_history;
  double euler_lagrange_residual = 0.0;  ///< |A u - N(u)| / |A u|
  double energy_identity_residual = 0.0;  ///< |B[u] - int |u|^{alpha+1}| / B[u]
  IdentityReport pohozaev_defect;
};

/// N(u)_i = int |u|^{alpha-1} u phi_i at the cell rule points.
Vec nonlinearity(const OperatorSet& ops, const Vec& u, double alpha);
/// int |u|^p at the cell rule points.
double lp_power(const OperatorSet& ops, const Vec& u, double p);

/// Normalized fixed-point iteration u <- (A^{-1} N(u)) / |.|_{alpha+1} from
/// `seed`, or from x_N times the distance to the boundary when seed is empty.
SemilinearResult minimize_I(const OperatorSet& ops, double lambda, double alpha, const SemilinearOptions& options = {},
                            const Vec* seed = nullptr);

/// lhs = 1/2 int_Gamma (x.nu)(du/dnu)^2, rhs = (N/(1+alpha) - (N-2)/2) int |u|^{alpha+1}.
IdentityReport pohozaev_defect(const OperatorSet& ops, const SemilinearResult& result);

/// N/(1+alpha) - (N-2)/2.
double criticality_coefficient(int N, double alpha);

}  // namespace hardylab
