#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardylab/operator.hpp"

using namespace hardylab;
using boost::math::quadrature::gauss_kronrod;

namespace {

OperatorSet disk(double h, Exec exec = Exec::parallel) {
  AssemblyOptions o;
  o.exec = exec;
  return assemble(generate_mesh(build_domain(DomainKind::tangent_disk, 1.0), h), o);
}

// Nested polar integral over the tangent disk of radius 1: rho < 2 sin(theta).
template <class F>
double polar_disk_integral(F f) {
  auto inner = [&](double th) {
    const double s = 2.0 * std::sin(th);
    return gauss_kronrod<double, 31>::integrate(
        [&](double r) { return f(r * std::cos(th), r * std::sin(th)) * r; }, 0.0, s, 10, 1e-13);
  };
  return gauss_kronrod<double, 31>::integrate(inner, 0.0, std::numbers::pi, 10, 1e-13);
}

}  // namespace

TEST_CASE("1D stiffness and mass entries are the closed-form P1 values") {
  const double h = 0.05;
  const OperatorSet ops = assemble(generate_mesh(build_domain(DomainKind::interval, 1.0), h));
  const int n = ops.dofs();
  for (int i = 0; i < n; ++i) {
    CHECK(ops.K.coeff(i, i) == doctest::Approx(2.0 / h));
    CHECK(ops.M.coeff(i, i) == doctest::Approx(2.0 * h / 3.0));
    if (i + 1 < n) {
      CHECK(ops.K.coeff(i, i + 1) == doctest::Approx(-1.0 / h));
      CHECK(ops.M.coeff(i, i + 1) == doctest::Approx(h / 6.0));
    }
  }
}

TEST_CASE("1D singular weight matches adaptive Gauss-Kronrod quadrature") {
  auto weight_oracle = [](double h, int i, int j) {
    // hat function of dof i sits at x_{i+1} = (i + 1) h
    auto hat = [h](int k, double x) { return std::max(0.0, 1.0 - std::abs(x - (k + 1) * h) / h); };
    double ref = 0.0;
    for (int c = std::max(i, j); c <= std::min(i, j) + 1; ++c) {
      ref += gauss_kronrod<double, 31>::integrate([&](double x) { return hat(i, x) * hat(j, x) / (x * x); }, c * h,
                                                  (c + 1) * h, 15, 1e-14);
    }
    return ref;
  };
  const DomainSpec unit = build_domain(DomainKind::interval, 1.0);

  SUBCASE("hat at 1/2 on h = 1/4") {
    // same cells around x = 1/2 as the unit interval, with h inside the mesher's range
    const OperatorSet ops = assemble(generate_mesh(build_domain(DomainKind::interval, 1.25), 0.25));
    const Vec u = Vec::Unit(ops.dofs(), 1);
    CHECK(u.dot(ops.K * u) == doctest::Approx(8.0).epsilon(1e-13));
    CHECK(u.dot(ops.M * u) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(std::abs(u.dot(ops.W * u) - weight_oracle(0.25, 1, 1)) <= 1e-6);
  }

  SUBCASE("every entry converges with the quadrature order") {
    const double h = 0.1;
    const Mesh m = generate_mesh(unit, h);
    double prev = 1.0;
    for (int order : {4, 6, 10}) {
      AssemblyOptions o;
      o.quad_order = order;
      const OperatorSet ops = assemble(m, o);
      double err = 0.0;
      for (int i = 0; i < ops.dofs(); ++i) {
        for (int j = std::max(0, i - 1); j <= std::min(ops.dofs() - 1, i + 1); ++j) {
          const double ref = weight_oracle(h, i, j);
          err = std::max(err, std::abs(ops.W.coeff(i, j) - ref) / ref);
        }
      }
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-6);
  }
}

TEST_CASE("bubble forms on the tangent disk converge to polar quadrature") {
  // b = 1 - |x - e_2|^2 = 2 x_2 - |x|^2
  auto b = [](double x, double y) { return 2.0 * y - x * x - y * y; };
  const double k_ref = polar_disk_integral([](double x, double y) { return 4.0 * (x * x + (y - 1) * (y - 1)); });
  const double w_ref = polar_disk_integral([&](double x, double y) { return b(x, y) * b(x, y) / (x * x + y * y); });
  CHECK(k_ref == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-10));
  CHECK(w_ref == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-10));
  double prev = 1.0;
  for (double h : {0.1, 0.05}) {
    const OperatorSet ops = disk(h);
    const Vec u = ops.interpolate([&](const Point& p) { return b(p[0], p[1]); });
    const double ek = std::abs(u.dot(ops.K * u) - k_ref) / k_ref;
    const double ew = std::abs(u.dot(ops.W * u) - w_ref) / w_ref;
    CHECK(ek < 0.05);
    CHECK(ew < 0.05);
    CHECK(ew < prev);
    prev = ew;
  }
}

TEST_CASE("factored form agrees with the Hardy form") {
  const OperatorSet ops = disk(0.05);
  const Vec u = ops.interpolate([](const Point& p) { return (2.0 * p[1] - p[0] * p[0] - p[1] * p[1]) * (1.0 + p[0]); });
  for (double lambda : {0.0, 0.5, 1.0}) {
    const double a = hardy_form(ops, lambda, u);
    const double g = factored_form(ops, lambda, u);
    CHECK(std::abs(a - g) / a < 0.05);
  }
  CHECK_THROWS_AS(hardy_form(ops, 1.01, u), std::invalid_argument);
}

TEST_CASE("serial and parallel assembly agree") {
  const OperatorSet s = disk(0.08, Exec::serial);
  const OperatorSet p = disk(0.08, Exec::parallel);
  CHECK((s.K - p.K).norm() <= 1e-14 * s.K.norm());
  CHECK((s.W - p.W).norm() <= 1e-14 * s.W.norm());
  CHECK((s.W_log - p.W_log).norm() <= 1e-14 * s.W_log.norm());
  CHECK((s.G - p.G).norm() <= 1e-14 * s.G.norm());
  CHECK((s.K_eps(1.0) - p.K_eps(1.0)).norm() <= 1e-14 * s.K_eps(1.0).norm());
}

TEST_CASE("boundary flux") {
  const OperatorSet ops = assemble(generate_mesh(build_domain(DomainKind::interval, 1.0), 0.01));
  // u = x(1 - x): du/dnu = -1 at 0 and -1 at 1
  const Vec flux = boundary_flux(ops, ops.interpolate([](const Point& p) { return p[0] * (1.0 - p[0]); }));
  REQUIRE(flux.size() == 2);
  CHECK(flux[0] == doctest::Approx(-1.0).epsilon(0.02));
  CHECK(flux[1] == doctest::Approx(-1.0).epsilon(0.02));

  const OperatorSet d = disk(0.1);
  const Vec ones = Vec::Ones(static_cast<Eigen::Index>(d.mesh().facets.size()));
  CHECK(xnu_flux_energy(d.mesh(), ones) == doctest::Approx(2.0 * d.mesh().measure()).epsilon(1e-12));
  // int_circle |x|^2 = int 2 x_2 ds = 4 pi
  CHECK(r2_flux_energy(d.mesh(), ones) == doctest::Approx(4.0 * std::numbers::pi).epsilon(0.01));
}

TEST_CASE("weighted stiffness cache and exports") {
  const OperatorSet ops = disk(0.2);
  const SpMat& a = ops.K_eps(1.0);
  const SpMat& b = ops.K_eps(1.0);
  CHECK(&a == &b);
  CHECK_THROWS_AS(static_cast<void>(ops.K_eps(0.0)), std::invalid_argument);
  std::ostringstream os;
  export_matrix(os, ops.K);
  std::size_t lines = 0;
  for (char ch : os.str()) lines += ch == '\n';
  CHECK(lines == static_cast<std::size_t>(ops.K.nonZeros()) + 1);
  CHECK(ops.clamped_points == 0);
}

TEST_CASE("truncated factored table grows as eps decreases") {
  const OperatorSet ops = disk(0.05);
  const Vec u = ops.interpolate([](const Point& p) { return 2.0 * p[1] - p[0] * p[0] - p[1] * p[1]; });
  const auto rows = truncated_factored_table(ops, 1.0, u, {0.5, 0.1, 0.01, 0.0});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].value >= rows[i - 1].value);
  CHECK(rows.back().value == doctest::Approx(factored_form(ops, 1.0, u)).epsilon(1e-10));
}
