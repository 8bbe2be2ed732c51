#include "hardylab/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hardylab {

namespace {

/// int (x . grad u) f over the mesh, at the cell rule points.
double radial_load_moment(const OperatorSet& ops, const Vec& u, const ScalarField& f) {
  const Mesh& m = ops.mesh();
  const auto& rule = ops.rule();
  const Vec uv = ops.vertex_values(u);
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto v = m.cell(c);
    const auto grad = p1_gradients(m, c);
    Point gu{0.0, 0.0};
    for (int k = 0; k <= m.dim; ++k) {
      gu[0] += uv[v[k]] * grad[k][0];
      gu[1] += uv[v[k]] * grad[k][1];
    }
    const double vol = m.cell_measure(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = m.map(c, rule.bary[q]);
      s += rule.weights[q] * vol * (x[0] * gu[0] + x[1] * gu[1]) * f(x);
    }
  }
  return s;
}

}  // namespace

EllipticSolution solve(const OperatorSet& ops, double lambda, const ScalarField& f, const CgOptions& options) {
  if (lambda > ops.lambda_N * (1.0 + 1e-14)) throw std::invalid_argument("solve: lambda exceeds lambda(N)");
  EllipticSolution sol;
  sol.lambda = lambda;
  sol.f = f;
  sol.load = ops.load(f);
  const SpMat A = ops.hardy_matrix(lambda);
  CgResult cg = pcg(A, sol.load, options);
  sol.u = std::move(cg.x);
  sol.residual = cg.relative_residual;
  sol.iterations = cg.iterations;
  sol.history = std::move(cg.history);
  sol.energy = quad_form(A, sol.u, ops.exec());
  return sol;
}

IdentityReport pohozaev_check(const OperatorSet& ops, const EllipticSolution& sol) {
  const Vec flux = boundary_flux(ops, sol.u);
  const double lhs = 0.5 * xnu_flux_energy(ops.mesh(), flux);
  const double N = ops.dim();
  const double rhs = -radial_load_moment(ops, sol.u, sol.f) - 0.5 * (N - 2.0) * sol.energy;
  return make_report("pohozaev", lhs, rhs, ops.mesh().h);
}

double trace_ratio(const OperatorSet& ops, const EllipticSolution& sol) {
  const Vec flux = boundary_flux(ops, sol.u);
  const double num = r2_flux_energy(ops.mesh(), flux);
  const ScalarField& f = sol.f;
  const double f2 = ops.integrate([&f](const Point& x) {
    const double v = f(x);
    return v * v;
  });
  const double den = sol.energy + f2;
  if (den == 0.0) return 0.0;
  return num / den;
}

std::vector<ScalarField> battery_loads(const DomainSpec& domain) {
  const int n = domain.dim - 1;
  const double R = domain.R_Omega;
  return {
      [](const Point&) { return 1.0; },
      [n](const Point& x) { return x[n]; },
      [n, R](const Point& x) { return std::sin(std::numbers::pi * x[n] / R); },
  };
}

double trace_battery(const OperatorSet& ops, double lambda, const CgOptions& options) {
  double worst = 0.0;
  for (const auto& f : battery_loads(ops.mesh().domain)) {
    worst = std::max(worst, trace_ratio(ops, solve(ops, lambda, f, options)));
  }
  return worst;
}

ContinuationTable lambda_continuation(const OperatorSet& ops, const ScalarField& f, const std::vector<double>& eps_list,
                                      const CgOptions& options) {
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] >= 0.0)) throw std::invalid_argument("lambda_continuation: eps must be non-negative");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("lambda_continuation: eps_list must be strictly decreasing");
    }
  }
  const double lN = ops.lambda_N;
  const EllipticSolution base = solve(ops, lN, f, options);
  const SpMat B = ops.hardy_matrix(lN);

  ContinuationTable table;
  for (double eps : eps_list) {
    ContinuationRow row;
    row.eps = eps;
    row.lambda = lN - eps;
    if (eps == 0.0) {
      row.iterations = base.iterations;
    } else {
      const EllipticSolution s = solve(ops, row.lambda, f, options);
      const Vec d = s.u - base.u;
      row.distance = std::sqrt(std::max(0.0, quad_form(B, d, ops.exec())));
      row.weighted = eps * quad_form(ops.W, s.u, ops.exec());
      row.iterations = s.iterations;
    }
    table.rows.push_back(row);
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& a = table.rows[i - 1];
    const auto& b = table.rows[i];
    if (!(b.distance < a.distance)) {
      table.distance_decreasing = false;
      std::ostringstream os;
      os << "distance column not decreasing at eps = " << b.eps;
      table.warnings.push_back(os.str());
    }
    if (!(b.weighted < a.weighted)) {
      table.weighted_decreasing = false;
      std::ostringstream os;
      os << "eps-weighted column not decreasing at eps = " << b.eps;
      table.warnings.push_back(os.str());
    }
  }
  return table;
}

}  // namespace hardylab
