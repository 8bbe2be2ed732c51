#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hardylab/linalg.hpp"
#include "hardylab/semilinear.hpp"

using namespace hardylab;

namespace {

OperatorSet interval(double h) { return assemble(generate_mesh(build_domain(DomainKind::interval, 1.0), h)); }

// Independent P1 model of (0,1) with n interior nodes, lambda = 0, alpha = 3.
struct Quartic {
  int n;
  double h;

  std::vector<double> padded(const std::vector<double>& u) const {
    std::vector<double> p(n + 2, 0.0);
    for (int i = 0; i < n; ++i) p[i + 1] = u[i];
    return p;
  }
  double stiffness(const std::vector<double>& u) const {
    const auto p = padded(u);
    double s = 0.0;
    for (int c = 0; c <= n; ++c) s += (p[c + 1] - p[c]) * (p[c + 1] - p[c]) / h;
    return s;
  }
  std::vector<double> k_apply(const std::vector<double>& u) const {
    const auto p = padded(u);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = (2.0 * p[i + 1] - p[i] - p[i + 2]) / h;
    return y;
  }
  // int u^4 over a cell with end values a, b is h (a^4 + a^3 b + a^2 b^2 + a b^3 + b^4) / 5
  double quartic(const std::vector<double>& u) const {
    const auto p = padded(u);
    double s = 0.0;
    for (int c = 0; c <= n; ++c) {
      const double a = p[c], b = p[c + 1];
      s += h * (a * a * a * a + a * a * a * b + a * a * b * b + a * b * b * b + b * b * b * b) / 5.0;
    }
    return s;
  }
  std::vector<double> quartic_grad(const std::vector<double>& u) const {
    const auto p = padded(u);
    std::vector<double> g(n + 2, 0.0);
    for (int c = 0; c <= n; ++c) {
      const double a = p[c], b = p[c + 1];
      g[c] += h * (4 * a * a * a + 3 * a * a * b + 2 * a * b * b + b * b * b) / 5.0;
      g[c + 1] += h * (a * a * a + 2 * a * a * b + 3 * a * b * b + 4 * b * b * b) / 5.0;
    }
    return {g.begin() + 1, g.end() - 1};
  }
  // Thomas algorithm for the stiffness matrix tridiag(-1, 2, -1)/h
  std::vector<double> k_solve(std::vector<double> b) const {
    std::vector<double> c(n, 0.0);
    double d = 2.0 / h;
    c[0] = -1.0 / h / d;
    b[0] /= d;
    for (int i = 1; i < n; ++i) {
      d = 2.0 / h + c[i - 1] / h;
      if (i + 1 < n) c[i] = -1.0 / h / d;
      b[i] = (b[i] + b[i - 1] / h) / d;
    }
    for (int i = n - 2; i >= 0; --i) b[i] -= c[i] * b[i + 1];
    return b;
  }
  // Q(u) = int u'^2 / (int u^4)^{1/2} and its Euclidean gradient
  double quotient(const std::vector<double>& u, std::vector<double>* grad) const {
    const double N = stiffness(u), F = quartic(u), D = std::sqrt(F);
    if (grad) {
      const auto ku = k_apply(u);
      const auto gf = quartic_grad(u);
      grad->resize(n);
      for (int i = 0; i < n; ++i) (*grad)[i] = 2.0 * ku[i] / D - 0.5 * N * gf[i] / (F * D);
    }
    return N / D;
  }
};

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Barzilai-Borwein descent in the H^1_0 metric, rescaled to int u^4 = 1 each step.
double bb_minimize(const Quartic& q, std::vector<double> u) {
  auto normalize = [&](std::vector<double>& v) {
    const double s = std::pow(q.quartic(v), 0.25);
    for (auto& x : v) x /= s;
  };
  normalize(u);
  std::vector<double> g, gs;
  double val = q.quotient(u, &g);
  double tau = 1e-3;
  for (int it = 0; it < 5000; ++it) {
    gs = q.k_solve(g);
    const double gnorm = std::sqrt(dotv(gs, g));
    if (gnorm <= 1e-11 * val) break;
    std::vector<double> un(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) un[i] = u[i] - tau * gs[i];
    normalize(un);
    std::vector<double> gn;
    const double vn = q.quotient(un, &gn);
    std::vector<double> s(u.size()), y(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      s[i] = un[i] - u[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = dotv(s, y);
    tau = sy > 0.0 ? dotv(s, q.k_apply(s)) / sy : 1e-3;
    u = std::move(un);
    g = std::move(gn);
    val = vn;
  }
  return val;
}

}  // namespace

TEST_CASE("criticality coefficient") {
  CHECK(criticality_coefficient(3, 5.0) == 0.0);
  CHECK(criticality_coefficient(4, 3.0) == 0.0);
  CHECK(criticality_coefficient(2, 3.0) == 0.5);
  CHECK(criticality_coefficient(3, 3.0) > 0.0);
  CHECK(criticality_coefficient(3, 7.0) < 0.0);
  CHECK_THROWS_AS(criticality_coefficient(2, 1.0), std::invalid_argument);
}

TEST_CASE("interval ground state matches an independent Barzilai-Borwein minimization") {
  const double h = 0.01;
  const OperatorSet ops = interval(h);
  const SemilinearResult r = minimize_I(ops, 0.0, 3.0);
  const Quartic q{ops.dofs(), h};
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> d;
  double best = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 5; ++restart) {
    std::vector<double> u(q.n);
    for (auto& x : u) x = d(rng);
    best = std::min(best, bb_minimize(q, u));
  }
  CHECK(std::abs(r.I_value - best) <= 1e-4 * best);
  CHECK(r.I_value > 0.0);
}

TEST_CASE("Euler-Lagrange, energy identity and Pohozaev defect") {
  const OperatorSet ops = interval(0.001);
  const SemilinearResult r = minimize_I(ops, 0.2, 3.0);
  CHECK(r.euler_lagrange_residual <= 1e-6);
  CHECK(r.energy_identity_residual <= 1e-6);
  CHECK(r.pohozaev_defect.rel_residual <= 0.05);
  CHECK(r.pohozaev_defect.lhs >= -1e-10);
  CHECK(r.u.norm() > 1e-6);
  for (std::size_t k = 1; k < r.quotient_history.size(); ++k) {
    CHECK(r.quotient_history[k] <= r.quotient_history[k - 1] * (1.0 + 1e-10));
  }
  const SemilinearResult disk =
      minimize_I(assemble(generate_mesh(build_domain(DomainKind::tangent_disk, 1.0), 0.08)), 0.5, 3.0);
  CHECK(disk.euler_lagrange_residual <= 1e-6);
  CHECK(disk.pohozaev_defect.lhs >= -1e-10);
}

TEST_CASE("alpha near 1 aligns with the first eigenvector") {
  const OperatorSet ops = assemble(generate_mesh(build_domain(DomainKind::tangent_disk, 1.0), 0.08));
  const SemilinearResult r = minimize_I(ops, 0.5, 1.001);
  const EigenPair e = smallest_eigenpair(ops.hardy_matrix(0.5), ops.M);
  const double c = std::abs(r.normalized.dot(ops.M * e.vector)) /
                   std::sqrt(r.normalized.dot(ops.M * r.normalized) * e.vector.dot(ops.M * e.vector));
  CHECK(c >= 0.999);
}

TEST_CASE("preconditions and failure modes") {
  const OperatorSet ops = interval(0.02);
  const Vec zero = Vec::Zero(ops.dofs());
  CHECK_THROWS_AS(minimize_I(ops, 0.0, 3.0, {}, &zero), std::invalid_argument);
  CHECK_THROWS_AS(minimize_I(ops, 0.3, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(minimize_I(ops, 0.0, 1.0), std::invalid_argument);
  SemilinearOptions o;
  o.max_iter = 1;
  CHECK_THROWS_AS(minimize_I(ops, 0.0, 3.0, o), ConvergenceError);

  SemilinearResult empty;
  empty.alpha = 3.0;
  empty.u = zero;
  const IdentityReport d = pohozaev_defect(ops, empty);
  CHECK(d.lhs == 0.0);
  CHECK(d.rhs == 0.0);
}
