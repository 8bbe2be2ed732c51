#include <doctest.h>

#include <cmath>

#include "hardylab/elliptic.hpp"

using namespace hardylab;

namespace {

OperatorSet interval(double h) { return assemble(generate_mesh(build_domain(DomainKind::interval, 1.0), h)); }

}  // namespace

TEST_CASE("1D Pohozaev identity: both sides tend to 1/8 at first order") {
  // u = x(1 - x)/2: 1/2 (x.nu)(u')^2 at x = 1 is 1/8, and -int x u' = 1/8
  double prev = 1.0;
  for (double h : {0.004, 0.002, 0.001}) {
    const OperatorSet ops = interval(h);
    const EllipticSolution sol = solve(ops, 0.0, [](const Point&) { return 1.0; });
    const IdentityReport r = pohozaev_check(ops, sol);
    CHECK(std::abs(r.lhs - 0.125) <= 1e-3 * (h / 0.001));
    CHECK(std::abs(r.rhs - 0.125) <= 1e-5);
    const double err = std::abs(r.lhs - 0.125);
    CHECK(err / prev < 0.6);
    prev = err;
  }
}

TEST_CASE("discrete solution matches the closed form at the nodes") {
  const OperatorSet ops = interval(0.01);
  const EllipticSolution sol = solve(ops, 0.0, [](const Point&) { return 1.0; });
  const Vec ref = ops.interpolate([](const Point& p) { return 0.5 * p[0] * (1.0 - p[0]); });
  CHECK((sol.u - ref).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK(sol.energy == doctest::Approx(1.0 / 12.0).epsilon(1e-3));
}

TEST_CASE("trace ratio of the constant load tends to 3/13") {
  // B[u] = 1/12, |f|^2 = 1, |x|^2 (u')^2 = 1/4 at x = 1
  const OperatorSet ops = interval(0.0005);
  const EllipticSolution sol = solve(ops, 0.0, [](const Point&) { return 1.0; });
  CHECK(trace_ratio(ops, sol) == doctest::Approx(3.0 / 13.0).epsilon(2e-3));
  const EllipticSolution zero = solve(ops, 0.0, [](const Point&) { return 0.0; });
  CHECK(trace_ratio(ops, zero) == 0.0);
}

TEST_CASE("2D Pohozaev residual decreases under refinement") {
  double prev = 1.0;
  for (double h : {0.08, 0.04}) {
    const OperatorSet ops = assemble(generate_mesh(build_domain(DomainKind::tangent_disk, 1.0), h));
    const IdentityReport r = pohozaev_check(ops, solve(ops, 0.75, [](const Point&) { return 1.0; }));
    CHECK(r.rel_residual < prev);
    CHECK(r.rel_residual < 0.05);
    prev = r.rel_residual;
  }
}

TEST_CASE("trace battery stays bounded at lambda(N)") {
  const double a = trace_battery(interval(0.01), 0.25);
  const double b = trace_battery(interval(0.005), 0.25);
  CHECK(std::isfinite(a));
  CHECK(b <= 1.5 * a);
}

TEST_CASE("lambda continuation") {
  const OperatorSet ops = interval(0.001);
  const auto one = [](const Point&) { return 1.0; };
  const ContinuationTable t = lambda_continuation(ops, one, {0.1, 0.01, 0.001});
  CHECK(t.distance_decreasing);
  CHECK(t.weighted_decreasing);
  CHECK(t.rows.size() == 3);
  CHECK(t.rows[0].lambda == doctest::Approx(0.15));
  const ContinuationTable z = lambda_continuation(ops, one, {0.1, 0.0});
  CHECK(z.rows.back().distance == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(lambda_continuation(ops, one, {0.01, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(solve(ops, 0.3, one), std::invalid_argument);
}
