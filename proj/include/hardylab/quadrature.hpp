#pragma once

#include <array>
#include <functional>
#include <vector>

namespace hardylab {

using Point = std::array<double, 2>;
using ScalarField = std::function<double(const Point&)>;

/// Quadrature rule on a reference simplex given in barycentric coordinates.
/// Weights sum to one; multiply by the cell measure to integrate.
struct QuadRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
  int degree = 0;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
};

/// n-point Gauss-Legendre rule on [0,1], barycentric (1-s, s, 0).
QuadRule gauss_legendre(int npoints);

/// Rule exact for polynomials of total degree `degree` on the reference
/// simplex of dimension 1 or 2. All points lie strictly inside the simplex.
QuadRule simplex_rule(int dim, int degree);

}  // namespace hardylab
