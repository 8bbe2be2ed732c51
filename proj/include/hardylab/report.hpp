#pragma once

#include <algorithm>
#include <cmath>
#include <string>

namespace hardylab {

/// Two sides of a tested identity and their residuals.
struct IdentityReport {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_residual = 0.0;
  double rel_residual = 0.0;  ///< |lhs - rhs| / max(|lhs|, |rhs|, 1e-30)
  double h = 0.0;
};

inline IdentityReport make_report(std::string check, double lhs, double rhs, double h) {
  IdentityReport r{std::move(check), lhs, rhs, std::abs(lhs - rhs), 0.0, h};
  r.rel_residual = r.abs_residual / std::max({std::abs(lhs), std::abs(rhs), 1e-30});
  return r;
}

}  // namespace hardylab
