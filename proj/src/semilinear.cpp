#include "hardylab/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hardylab/linalg.hpp"

namespace hardylab {

namespace {

double signed_power(double x, double p) { return std::copysign(std::pow(std::abs(x), p), x); }

/// Value of u at the barycentric point of cell c.
double cell_value(const Mesh& m, const Vec& u, int c, const std::array<double, 3>& bary) {
  const auto v = m.cell(c);
  double s = 0.0;
  for (int k = 0; k <= m.dim; ++k) {
    const int d = m.dof[v[k]];
    if (d >= 0) s += bary[k] * u[d];
  }
  return s;
}

Vec seed_vector(const OperatorSet& ops, int variant) {
  const DomainSpec& dom = ops.mesh().domain;
  const int n = ops.dim() - 1;
  return ops.interpolate([&](const Point& x) {
    const double dist = std::max(0.0, -dom.level(x));
    switch (variant) {
      case 0: return x[n] * dist;
      case 1: return dist;
      default: return dist * (1.0 + 0.5 * std::sin(3.0 * x[0] + 1.0) + 0.25 * x[n]);
    }
  });
}

struct Attempt {
  bool ok = false;
  Vec u;
  double quotient = 0.0;
  double lagrange = 0.0;
  int iterations = 0;
  std::vector<double> history;
  std::string reason;
};

Attempt iterate(const OperatorSet& ops, const SpMat& A, const SpdFactor& factor, double alpha, Vec u,
                const SemilinearOptions& options) {
  Attempt at;
  const double p = alpha + 1.0;
  u /= std::pow(lp_power(ops, u, p), 1.0 / p);
  double prev = u.dot(A * u);
  at.history.push_back(prev);
  int rises = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    Vec next = factor.solve(nonlinearity(ops, u, alpha));
    const double norm = std::pow(lp_power(ops, next, p), 1.0 / p);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      at.reason = "iterate collapsed to zero";
      return at;
    }
    u = next / norm;
    const Vec Au = A * u;
    const double J = u.dot(Au);
    at.history.push_back(J);
    if (J > prev * (1.0 + 1e-12) && ++rises > 5) {
      at.reason = "quotient oscillates";
      return at;
    }
    // A u = c N(u) at the fixed point with c = B[u] under the normalization.
    const double el = (Au - J * nonlinearity(ops, u, alpha)).norm() / Au.norm();
    const double change = std::abs(J - prev) / std::abs(J);
    prev = J;
    if (change <= options.tol && el <= options.el_tol) {
      at.ok = true;
      at.u = u;
      at.quotient = J;
      at.iterations = it;
      return at;
    }
  }
  at.reason = "no stagnation within max_iter";
  return at;
}

}  // namespace

Vec nonlinearity(const OperatorSet& ops, const Vec& u, double alpha) {
  const Mesh& m = ops.mesh();
  const QuadRule& rule = ops.rule();
  Vec out = Vec::Zero(ops.dofs());
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto v = m.cell(c);
    const double vol = m.cell_measure(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double g = rule.weights[q] * vol * signed_power(cell_value(m, u, c, rule.bary[q]), alpha);
      for (int k = 0; k <= m.dim; ++k) {
        const int d = m.dof[v[k]];
        if (d >= 0) out[d] += g * rule.bary[q][k];
      }
    }
  }
  return out;
}

double lp_power(const OperatorSet& ops, const Vec& u, double p) {
  const Mesh& m = ops.mesh();
  const QuadRule& rule = ops.rule();
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const double vol = m.cell_measure(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      s += rule.weights[q] * vol * std::pow(std::abs(cell_value(m, u, c, rule.bary[q])), p);
    }
  }
  return s;
}

double criticality_coefficient(int N, double alpha) {
  if (N < 1 || !(alpha > 1.0)) throw std::invalid_argument("criticality_coefficient: need N >= 1 and alpha > 1");
  return N / (1.0 + alpha) - (N - 2) / 2.0;
}

IdentityReport pohozaev_defect(const OperatorSet& ops, const SemilinearResult& result) {
  const double lhs = 0.5 * xnu_flux_energy(ops.mesh(), boundary_flux(ops, result.u));
  const double rhs = criticality_coefficient(ops.dim(), result.alpha) * lp_power(ops, result.u, result.alpha + 1.0);
  return make_report("pohozaev_defect", lhs, rhs, ops.mesh().h);
}

SemilinearResult minimize_I(const OperatorSet& ops, double lambda, double alpha, const SemilinearOptions& options,
                            const Vec* seed) {
  if (lambda > ops.lambda_N * (1.0 + 1e-14)) throw std::invalid_argument("minimize_I: lambda exceeds lambda(N)");
  if (!(alpha > 1.0)) throw std::invalid_argument("minimize_I: alpha must exceed 1");
  if (ops.dim() > 2) throw std::invalid_argument("minimize_I: meshes of dimension <= 2 only");
  if (seed != nullptr && (seed->size() != ops.dofs() || seed->lpNorm<Eigen::Infinity>() == 0.0)) {
    throw std::invalid_argument("minimize_I: seed must be a nonzero dof vector");
  }
  const SpMat A = ops.hardy_matrix(lambda);
  const SpdFactor factor(A);
  if (!factor.positive_definite()) throw std::invalid_argument("minimize_I: K - lambda W is not positive definite");

  std::vector<double> all;
  std::ostringstream why;
  for (int s = 0; s < options.max_seeds; ++s) {
    const Vec start = (s == 0 && seed != nullptr) ? *seed : seed_vector(ops, seed != nullptr ? s - 1 : s);
    Attempt at = iterate(ops, A, factor, alpha, start, options);
    all.insert(all.end(), at.history.begin(), at.history.end());
    if (!at.ok) {
      why << " seed " << s << ": " << at.reason << ";";
      continue;
    }
    SemilinearResult r;
    r.alpha = alpha;
    r.lambda = lambda;
    r.normalized = at.u;
    r.I_value = at.quotient;
    r.iterations = at.iterations;
    r.seeds_used = s + 1;
    r.quotient_history = std::move(at.history);
    r.u = std::pow(at.quotient, 1.0 / (alpha - 1.0)) * at.u;
    const Vec Au = A * r.u;
    r.euler_lagrange_residual = (Au - nonlinearity(ops, r.u, alpha)).norm() / Au.norm();
    const double B = r.u.dot(Au);
    r.energy_identity_residual = std::abs(B - lp_power(ops, r.u, alpha + 1.0)) / B;
    if (!(r.I_value > 0.0) || r.u.norm() <= 1e-12) {
      why << " seed " << s << ": trivial limit;";
      continue;
    }
    r.pohozaev_defect = pohozaev_defect(ops, r);
    return r;
  }
  throw ConvergenceError("minimize_I: no seed converged;" + why.str(), std::move(all));
}

}  // namespace hardylab
