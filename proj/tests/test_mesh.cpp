#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hardylab/mesh.hpp"

using namespace hardylab;

namespace {

double det3(double a, double b, double c, double d, double e, double f, double g, double h, double i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

// Positive when p lies strictly inside the circumcircle of the ccw triangle (a, b, c).
double in_circle(const Point& a, const Point& b, const Point& c, const Point& p) {
  const double ax = a[0] - p[0], ay = a[1] - p[1];
  const double bx = b[0] - p[0], by = b[1] - p[1];
  const double cx = c[0] - p[0], cy = c[1] - p[1];
  return det3(ax, ay, ax * ax + ay * ay, bx, by, bx * bx + by * by, cx, cy, cx * cx + cy * cy);
}

double orient(const Point& a, const Point& b, const Point& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

}  // namespace

TEST_CASE("domain geometry") {
  const DomainSpec i = build_domain(DomainKind::interval, 2.0);
  CHECK(i.R_Omega == 2.0);
  CHECK(i.measure() == 2.0);
  const DomainSpec t = build_domain(DomainKind::tangent_disk, 1.5);
  CHECK(t.R_Omega == 3.0);
  CHECK(t.measure() == doctest::Approx(std::numbers::pi * 2.25));
  CHECK(t.level({0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(t.level({0.0, 1.5}) < 0.0);
  const DomainSpec hd = build_domain(DomainKind::half_disk, 1.0);
  CHECK(hd.R_Omega == 1.0);
  CHECK(hd.measure() == doctest::Approx(std::numbers::pi / 2.0));
  CHECK_THROWS_AS(build_domain(DomainKind::tangent_disk, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_domain(DomainKind::interval, -1.0), std::invalid_argument);
}

TEST_CASE("interval mesh") {
  const Mesh m = generate_mesh(build_domain(DomainKind::interval, 1.0), 0.01);
  CHECK(m.num_cells() == 100);
  CHECK(m.num_dofs() == 99);
  CHECK(m.h == doctest::Approx(0.01));
  CHECK(m.measure() == doctest::Approx(1.0));
  REQUIRE(m.origin_vertex >= 0);
  CHECK(m.vertices[m.origin_vertex][0] == 0.0);
  REQUIRE(m.facets.size() == 2);
  for (const auto& f : m.facets) {
    const double x = m.vertices[f.vertices[0]][0];
    CHECK(f.normal[0] == (x == 0.0 ? -1.0 : 1.0));
    CHECK(f.x_dot_nu == doctest::Approx(x));
    CHECK(f.gamma0);
  }
}

TEST_CASE("tangent disk mesh is a Delaunay triangulation of its vertices") {
  const Mesh m = generate_mesh(build_domain(DomainKind::tangent_disk, 1.0), 0.2);
  CHECK(m.measure() == doctest::Approx(std::numbers::pi).epsilon(0.03));
  REQUIRE(m.origin_vertex >= 0);
  CHECK(std::hypot(m.vertices[m.origin_vertex][0], m.vertices[m.origin_vertex][1]) < 1e-14);
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto v = m.cell(c);
    const Point &a = m.vertices[v[0]], &b = m.vertices[v[1]], &p = m.vertices[v[2]];
    REQUIRE(orient(a, b, p) > 0.0);
    const double scale = std::pow(m.cell_diameter(c), 4);
    for (int k = 0; k < m.num_vertices(); ++k) {
      if (k == v[0] || k == v[1] || k == v[2]) continue;
      CHECK(in_circle(a, b, p, m.vertices[k]) <= 1e-10 * scale);
    }
  }
  // x . nu = |x|^2 / (2r) >= 0 on the circle, so the whole boundary is Gamma_0
  for (const auto& f : m.facets) CHECK(f.gamma0);
}

TEST_CASE("disk mesh measure converges at second order") {
  const DomainSpec d = build_domain(DomainKind::tangent_disk, 1.0);
  const double e1 = std::abs(generate_mesh(d, 0.1).measure() - std::numbers::pi);
  const double e2 = std::abs(generate_mesh(d, 0.05).measure() - std::numbers::pi);
  CHECK(e2 < 0.4 * e1);
}

TEST_CASE("half disk mesh") {
  const Mesh m = generate_mesh(build_domain(DomainKind::half_disk, 1.0), 0.1);
  CHECK(m.measure() == doctest::Approx(std::numbers::pi / 2.0).epsilon(0.02));
  int flat = 0;
  for (const auto& f : m.facets) {
    if (std::abs(f.normal[1] + 1.0) < 1e-12) {
      ++flat;
      CHECK(std::abs(f.x_dot_nu) < 1e-14);
    }
    CHECK(f.gamma0);
  }
  CHECK(flat > 0);
  for (int c = 0; c < m.num_cells(); ++c) CHECK(aspect_ratio(m, c) < 12.0);
}

TEST_CASE("divergence theorem on the discrete boundary") {
  for (auto kind : {DomainKind::tangent_disk, DomainKind::half_disk}) {
    const Mesh m = generate_mesh(build_domain(kind, 1.0), 0.1);
    double s = 0.0;
    for (const auto& f : m.facets) s += f.xnu_integral;
    CHECK(s == doctest::Approx(2.0 * m.measure()).epsilon(1e-12));
  }
}

TEST_CASE("nested refinement") {
  const Mesh c = generate_mesh(build_domain(DomainKind::tangent_disk, 1.0), 0.2);
  const Mesh f = refine_nested(c);
  CHECK(f.num_cells() == 4 * c.num_cells());
  CHECK(f.level == 1);
  CHECK(f.measure() == doctest::Approx(c.measure()).epsilon(1e-13));
  CHECK(f.h == doctest::Approx(0.5 * c.h).epsilon(1e-12));
  for (int k = 0; k < c.num_vertices(); ++k) {
    CHECK(f.vertices[k] == c.vertices[k]);
    CHECK(f.on_boundary[k] == c.on_boundary[k]);
  }
  const Mesh i = refine_nested(generate_mesh(build_domain(DomainKind::interval, 1.0), 0.1));
  CHECK(i.num_cells() == 20);
  CHECK(i.h == doctest::Approx(0.05));
}

TEST_CASE("grading clusters vertices toward the origin") {
  const DomainSpec d = build_domain(DomainKind::interval, 1.0);
  MeshOptions o;
  o.grading = 1.0;
  const Mesh g = generate_mesh(d, 0.05, o);
  double first = 1.0;
  for (const auto& v : g.vertices) {
    if (v[0] > 0.0) first = std::min(first, v[0]);
  }
  CHECK(first < 0.05 * 0.5);
  CHECK_THROWS_AS(generate_mesh(d, 0.05, MeshOptions{2.5, 12.0}), std::invalid_argument);
}

TEST_CASE("mesh text round trip") {
  const Mesh m = generate_mesh(build_domain(DomainKind::half_disk, 1.0), 0.2);
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss);
  CHECK(r.num_vertices() == m.num_vertices());
  CHECK(r.cells == m.cells);
  CHECK(r.num_dofs() == m.num_dofs());
  CHECK(r.facets.size() == m.facets.size());
  CHECK(r.origin_vertex == m.origin_vertex);
  std::stringstream bad("DOMAIN interval 1\nDIM 1\nVERTICES 3\n0 0\n");
  CHECK_THROWS(read_mesh(bad));
}

TEST_CASE("classification") {
  const Mesh m = generate_mesh(build_domain(DomainKind::tangent_disk, 1.0), 0.1);
  const BoundaryClassification b = classify_boundary(m);
  CHECK(b.gamma0.size() == m.facets.size());
  // x . nu = O(|x|^2) near the origin
  CHECK(b.max_origin_ratio < 1.0);
}
