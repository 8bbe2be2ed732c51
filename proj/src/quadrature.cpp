#include "hardylab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hardylab {

namespace {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1] by Newton
// iteration on P_n from the Chebyshev initial guess.
void legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

void add_orbit3(QuadRule& r, double a, double w) {
  // (a, a, 1-2a) and permutations
  const double b = 1.0 - 2.0 * a;
  r.bary.push_back({a, a, b});
  r.bary.push_back({a, b, a});
  r.bary.push_back({b, a, a});
  r.weights.insert(r.weights.end(), {w, w, w});
}

}  // namespace

QuadRule gauss_legendre(int npoints) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: npoints must be >= 1");
  std::vector<double> x, w;
  legendre_nodes(npoints, x, w);
  QuadRule r;
  r.degree = 2 * npoints - 1;
  for (int i = 0; i < npoints; ++i) {
    const double s = 0.5 * (x[i] + 1.0);
    r.bary.push_back({1.0 - s, s, 0.0});
    r.weights.push_back(0.5 * w[i]);
  }
  return r;
}

QuadRule simplex_rule(int dim, int degree) {
  if (degree < 1) degree = 1;
  if (dim == 1) return gauss_legendre((degree + 2) / 2);
  if (dim != 2) throw std::invalid_argument("simplex_rule: dim must be 1 or 2");

  QuadRule r;
  if (degree <= 2) {
    add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
    r.degree = 2;
  } else if (degree <= 4) {
    // Dunavant, 6 points
    add_orbit3(r, 0.445948490915965, 0.223381589678011);
    add_orbit3(r, 0.091576213509771, 0.109951743655322);
    r.degree = 4;
  } else if (degree == 5) {
    // Dunavant, 7 points
    r.bary.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(0.225);
    add_orbit3(r, 0.470142064105115, 0.132394152788506);
    add_orbit3(r, 0.101286507323456, 0.125939180544827);
    r.degree = 5;
  } else {
    // Collapsed (Duffy) product of Gauss-Legendre rules.
    const int n = (degree + 3) / 2;
    std::vector<double> x, w;
    legendre_nodes(n, x, w);
    for (int i = 0; i < n; ++i) {
      const double u = 0.5 * (x[i] + 1.0);
      for (int j = 0; j < n; ++j) {
        const double v = 0.5 * (x[j] + 1.0);
        const double px = u;
        const double py = (1.0 - u) * v;
        r.bary.push_back({1.0 - px - py, px, py});
        // reference area 1/2, Jacobian (1-u), Gauss weights on [0,1] are w/2
        r.weights.push_back(2.0 * 0.25 * w[i] * w[j] * (1.0 - u));
      }
    }
    r.degree = 2 * n - 2;
  }
  return r;
}

}  // namespace hardylab
