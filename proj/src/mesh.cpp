#include "hardylab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "delaunay.hpp"

namespace hardylab {

namespace {

constexpr double pi = std::numbers::pi;

double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }
double norm2(const Point& a) { return dot(a, a); }
double dist(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

double orient(const Point& a, const Point& b, const Point& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

Point disk_center(const DomainSpec& d) { return {0.0, d.size}; }

}  // namespace

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::interval: return "interval";
    case DomainKind::tangent_disk: return "tangent_disk";
    case DomainKind::half_disk: return "half_disk";
  }
  return "unknown";
}

DomainKind parse_domain_kind(std::string_view name) {
  if (name == "interval") return DomainKind::interval;
  if (name == "tangent_disk") return DomainKind::tangent_disk;
  if (name == "half_disk") return DomainKind::half_disk;
  throw std::invalid_argument("unknown domain kind '" + std::string(name) + "'");
}

double DomainSpec::measure() const {
  switch (kind) {
    case DomainKind::interval: return size;
    case DomainKind::tangent_disk: return pi * size * size;
    case DomainKind::half_disk: return 0.5 * pi * size * size;
  }
  return 0.0;
}

double DomainSpec::level(const Point& x) const {
  switch (kind) {
    case DomainKind::interval: return std::max(-x[0], x[0] - size);
    case DomainKind::tangent_disk: {
      const Point c = disk_center(*this);
      return dist(x, c) - size;
    }
    case DomainKind::half_disk: return std::max(std::hypot(x[0], x[1]) - size, -x[1]);
  }
  return 0.0;
}

Point DomainSpec::normal(const Point& x) const {
  switch (kind) {
    case DomainKind::interval: return {x[0] < 0.5 * size ? -1.0 : 1.0, 0.0};
    case DomainKind::tangent_disk: {
      const Point c = disk_center(*this);
      return {(x[0] - c[0]) / size, (x[1] - c[1]) / size};
    }
    case DomainKind::half_disk: {
      if (std::abs(x[1]) < 1e-14 * size) return {0.0, -1.0};
      const double r = std::hypot(x[0], x[1]);
      return {x[0] / r, x[1] / r};
    }
  }
  return {0.0, 0.0};
}

double DomainSpec::bubble(const Point& x) const {
  switch (kind) {
    case DomainKind::interval: return x[0] * (size - x[0]);
    case DomainKind::tangent_disk: {
      const Point c = disk_center(*this);
      return size * size - norm2({x[0] - c[0], x[1] - c[1]});
    }
    case DomainKind::half_disk: return (size * size - norm2(x)) * x[1];
  }
  return 0.0;
}

DomainSpec build_domain(DomainKind kind, double size, double shift) {
  if (!(size > 0.0) || !std::isfinite(size)) {
    throw std::invalid_argument("build_domain: size parameter must be positive");
  }
  DomainSpec d;
  d.kind = kind;
  d.size = size;
  d.dim = kind == DomainKind::interval ? 1 : 2;
  switch (kind) {
    case DomainKind::interval: d.R_Omega = size; break;
    case DomainKind::tangent_disk: d.R_Omega = 2.0 * size; break;
    case DomainKind::half_disk: d.R_Omega = size; break;
  }

  // A shifted copy of the shape, translated along e_N, must still carry the
  // origin on its boundary; only shift = 0 does.
  const double scale = std::max(1.0, size);
  const Point origin_local = d.dim == 1 ? Point{-shift, 0.0} : Point{0.0, -shift};
  d.origin_on_boundary = std::abs(d.level(origin_local)) <= 1e-14 * scale;
  if (!d.origin_on_boundary) {
    throw std::invalid_argument("build_domain: origin is not on the boundary of " +
                                std::string(to_string(kind)));
  }

  // star-shapedness with respect to 0: x . nu >= 0 along the analytic boundary
  double min_xnu = 0.0;
  if (d.dim == 1) {
    // x . nu = 0 at the left end point, L at the right one
    min_xnu = 0.0;
  } else {
    const int samples = 4096;
    for (int k = 0; k < samples; ++k) {
      Point x;
      if (kind == DomainKind::tangent_disk) {
        const double th = -0.5 * pi + 2.0 * pi * k / samples;
        x = {size * std::cos(th), size + size * std::sin(th)};
      } else {
        const double th = pi * k / samples;
        x = {size * std::cos(th), size * std::sin(th)};
      }
      min_xnu = std::min(min_xnu, dot(x, d.normal(x)));
    }
  }
  d.star_shaped = min_xnu >= -tol_geom * scale;
  return d;
}

// ---------------------------------------------------------------------------

double Mesh::cell_measure(int c) const {
  const auto v = cell(c);
  if (dim == 1) return std::abs(vertices[v[1]][0] - vertices[v[0]][0]);
  return 0.5 * std::abs(orient(vertices[v[0]], vertices[v[1]], vertices[v[2]]));
}

double Mesh::cell_diameter(int c) const {
  const auto v = cell(c);
  if (dim == 1) return std::abs(vertices[v[1]][0] - vertices[v[0]][0]);
  return std::max({dist(vertices[v[0]], vertices[v[1]]), dist(vertices[v[1]], vertices[v[2]]),
                   dist(vertices[v[2]], vertices[v[0]])});
}

Point Mesh::map(int c, const std::array<double, 3>& bary) const {
  const auto v = cell(c);
  Point x{0.0, 0.0};
  for (int k = 0; k <= dim; ++k) {
    x[0] += bary[k] * vertices[v[k]][0];
    x[1] += bary[k] * vertices[v[k]][1];
  }
  return x;
}

double Mesh::measure() const {
  double s = 0.0;
  for (int c = 0; c < num_cells(); ++c) s += cell_measure(c);
  return s;
}

double aspect_ratio(const Mesh& mesh, int c) {
  if (mesh.dim == 1) return 1.0;
  const auto v = mesh.cell(c);
  const Point& a = mesh.vertices[v[0]];
  const Point& b = mesh.vertices[v[1]];
  const Point& p = mesh.vertices[v[2]];
  const double la = dist(b, p), lb = dist(a, p), lc = dist(a, b);
  const double area = 0.5 * std::abs(orient(a, b, p));
  if (area <= 0.0) return std::numeric_limits<double>::infinity();
  const double s = 0.5 * (la + lb + lc);
  return la * lb * lc * s / (8.0 * area * area);
}

namespace {

void fill_facet_geometry(BoundaryFacet& f, const Mesh& m) {
  if (m.dim == 1) {
    const Point& x = m.vertices[f.vertices[0]];
    f.measure = 1.0;
    f.centroid = x;
    f.x_dot_nu = x[0] * f.normal[0];
    f.xnu_integral = f.x_dot_nu;
    f.r2_integral = x[0] * x[0];
  } else {
    const Point& a = m.vertices[f.vertices[0]];
    const Point& b = m.vertices[f.vertices[1]];
    f.measure = dist(a, b);
    f.centroid = {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    // x . nu is constant along a straight facet
    f.x_dot_nu = 0.5 * (dot(a, f.normal) + dot(b, f.normal));
    f.xnu_integral = f.x_dot_nu * f.measure;
    f.r2_integral = f.measure * (norm2(a) + dot(a, b) + norm2(b)) / 3.0;
  }
  f.gamma0 = f.x_dot_nu >= -tol_geom;
}

/// Derive boundary facets, dof numbering, h and the origin vertex from the
/// vertex/cell arrays, then run the quality checks.
void finalize(Mesh& m, double max_aspect) {
  const int nv = m.num_vertices();
  const int nc = m.num_cells();
  m.facets.clear();
  m.on_boundary.assign(nv, 0);

  if (m.dim == 1) {
    // cells are ordered left to right
    int left = 0, right = 0;
    for (int v = 0; v < nv; ++v) {
      if (m.vertices[v][0] < m.vertices[left][0]) left = v;
      if (m.vertices[v][0] > m.vertices[right][0]) right = v;
    }
    int cl = -1, cr = -1;
    for (int c = 0; c < nc; ++c) {
      const auto v = m.cell(c);
      if (v[0] == left || v[1] == left) cl = c;
      if (v[0] == right || v[1] == right) cr = c;
    }
    BoundaryFacet fl, fr;
    fl.vertices = {left, -1};
    fl.cell = cl;
    fl.normal = {-1.0, 0.0};
    fr.vertices = {right, -1};
    fr.cell = cr;
    fr.normal = {1.0, 0.0};
    m.facets = {fl, fr};
  } else {
    // orient cells counter-clockwise
    for (int c = 0; c < nc; ++c) {
      int* v = m.cells.data() + 3 * c;
      if (orient(m.vertices[v[0]], m.vertices[v[1]], m.vertices[v[2]]) < 0.0) std::swap(v[1], v[2]);
    }
    std::map<std::pair<int, int>, std::pair<int, int>> edge_cells;  // (min,max) -> (cell, count)
    for (int c = 0; c < nc; ++c) {
      const auto v = m.cell(c);
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        auto [it, inserted] = edge_cells.try_emplace({std::min(a, b), std::max(a, b)}, c, 0);
        it->second.second++;
      }
    }
    for (int c = 0; c < nc; ++c) {
      const auto v = m.cell(c);
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        if (edge_cells.at({std::min(a, b), std::max(a, b)}).second != 1) continue;
        BoundaryFacet f;
        f.vertices = {a, b};
        f.cell = c;
        const Point& pa = m.vertices[a];
        const Point& pb = m.vertices[b];
        const double len = dist(pa, pb);
        // counter-clockwise cell: the outward normal is the edge rotated clockwise
        f.normal = {(pb[1] - pa[1]) / len, -(pb[0] - pa[0]) / len};
        m.facets.push_back(f);
      }
    }
    for (const auto& [edge, cc] : edge_cells) {
      if (cc.second > 2) throw MeshQualityError("non-manifold edge in triangulation");
    }
  }

  for (auto& f : m.facets) {
    fill_facet_geometry(f, m);
    m.on_boundary[f.vertices[0]] = 1;
    if (f.vertices[1] >= 0) m.on_boundary[f.vertices[1]] = 1;
  }

  m.dof.assign(nv, -1);
  m.dof_vertex.clear();
  m.origin_vertex = -1;
  for (int v = 0; v < nv; ++v) {
    if (norm2(m.vertices[v]) == 0.0) m.origin_vertex = v;
    if (!m.on_boundary[v]) {
      m.dof[v] = static_cast<int>(m.dof_vertex.size());
      m.dof_vertex.push_back(v);
    }
  }
  if (m.origin_vertex < 0 || !m.on_boundary[m.origin_vertex]) {
    throw MeshQualityError("mesh does not carry the origin as a boundary vertex");
  }

  m.h = 0.0;
  double worst = 1.0;
  int worst_cell = -1;
  for (int c = 0; c < nc; ++c) {
    m.h = std::max(m.h, m.cell_diameter(c));
    const double q = aspect_ratio(m, c);
    if (q > worst) {
      worst = q;
      worst_cell = c;
    }
  }
  if (worst > max_aspect) {
    std::ostringstream os;
    const Point x = m.map(worst_cell, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    os << "mesh quality: cell " << worst_cell << " near (" << x[0] << ", " << x[1]
       << ") has aspect ratio " << worst << " > " << max_aspect << " (" << nc << " cells, h = " << m.h
       << ")";
    throw MeshQualityError(os.str());
  }
}

Mesh interval_mesh(const DomainSpec& d, double h, double grading) {
  Mesh m;
  m.domain = d;
  m.dim = 1;
  const int n = std::max(4, static_cast<int>(std::ceil(d.size / h - 1e-9)));
  m.vertices.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double t = static_cast<double>(j) / n;
    m.vertices[j] = {d.size * (grading > 0.0 ? std::pow(t, 1.0 + grading) : t), 0.0};
  }
  m.vertices[n][0] = d.size;
  for (int j = 0; j < n; ++j) {
    m.cells.push_back(j);
    m.cells.push_back(j + 1);
  }
  return m;
}

Mesh tangent_disk_mesh(const DomainSpec& d, double h, double grading) {
  const double r = d.size;
  const Point c = disk_center(d);
  // lattice spacing below h so that the longest edges stay near h
  const double s = 0.8 * h;
  const double g = grading;

  std::vector<Point> pts;
  // boundary, parameterized by arc length from the origin
  int nb = std::max(12, static_cast<int>(std::ceil(2.0 * pi * r / s)));
  if (nb % 2) ++nb;
  pts.push_back({0.0, 0.0});
  for (int k = 1; k < nb; ++k) {
    double u = 2.0 * static_cast<double>(k) / nb - 1.0;  // (-1, 1), origin at u = +-1
    u = u < 0.0 ? u + 1.0 : u - 1.0;                      // origin at u = 0
    if (g > 0.0) u = (u < 0.0 ? -1.0 : 1.0) * std::pow(std::abs(u), 1.0 + g);
    const double th = -0.5 * pi + pi * u;
    pts.push_back({r * std::cos(th), r + r * std::sin(th)});
  }
  const auto boundary_count = pts.size();

  // hexagonal lattice, optionally pulled toward the origin along rays
  const double dy = s * std::sqrt(3.0) / 2.0;
  const int rows = static_cast<int>(std::ceil(2.0 * r / dy)) + 1;
  const int cols = static_cast<int>(std::ceil(2.0 * r / s)) + 2;
  for (int j = 0; j <= rows; ++j) {
    for (int i = -cols; i <= cols; ++i) {
      Point x{(i + 0.5 * (j % 2)) * s, j * dy};
      if (dist(x, c) > r - 0.45 * s) continue;
      double local = s;
      if (g > 0.0) {
        // ray from 0 meets the circle at distance 2 r sin(phi)
        const double rho = std::hypot(x[0], x[1]);
        if (rho == 0.0) continue;
        const double rho_b = 2.0 * r * (x[1] / rho);
        const double t = rho / rho_b;
        const double tg = std::pow(t, 1.0 + g);
        x = {x[0] * tg / t, x[1] * tg / t};
        local = s * (1.0 + g) * std::pow(t, g);
        if (rho_b * (1.0 - tg) < 0.45 * local) continue;
      }
      if (dist(x, c) > r - 0.45 * local) continue;
      bool close = false;
      for (std::size_t b = 0; b < boundary_count && !close; ++b) close = dist(x, pts[b]) < 0.55 * local;
      if (!close) pts.push_back(x);
    }
  }

  Mesh m;
  m.domain = d;
  m.dim = 2;
  m.vertices = pts;
  for (const auto& t : detail::delaunay_triangulate(pts)) {
    // drop slivers along the convex hull
    if (std::abs(orient(pts[t[0]], pts[t[1]], pts[t[2]])) < 1e-14 * h * h) continue;
    m.cells.insert(m.cells.end(), t.begin(), t.end());
  }
  return m;
}

Mesh half_disk_mesh(const DomainSpec& d, double h, double grading) {
  const double r = d.size;
  const int nr = std::max(3, static_cast<int>(std::ceil(r / h - 1e-9)));
  std::vector<double> rho(nr + 1);
  for (int k = 0; k <= nr; ++k) {
    const double t = static_cast<double>(k) / nr;
    rho[k] = r * (grading > 0.0 ? std::pow(t, 1.0 + grading) : t);
  }
  Mesh m;
  m.domain = d;
  m.dim = 2;
  m.vertices.push_back({0.0, 0.0});
  std::vector<std::vector<int>> ring(nr + 1);
  std::vector<std::vector<double>> angle(nr + 1);
  ring[0] = {0};
  angle[0] = {0.0};
  for (int k = 1; k <= nr; ++k) {
    const double drho = rho[k] - rho[k - 1];
    const int segs = std::max(2, static_cast<int>(std::lround(pi * rho[k] / drho)));
    for (int j = 0; j <= segs; ++j) {
      const double th = pi * j / segs;
      ring[k].push_back(m.vertices.size());
      angle[k].push_back(th);
      Point x{rho[k] * std::cos(th), rho[k] * std::sin(th)};
      if (j == segs) x[1] = 0.0;
      m.vertices.push_back(x);
    }
  }
  // fan around the origin
  for (std::size_t j = 0; j + 1 < ring[1].size(); ++j) {
    m.cells.insert(m.cells.end(), {0, ring[1][j], ring[1][j + 1]});
  }
  // merge consecutive rings by angle
  for (int k = 2; k <= nr; ++k) {
    const auto& a = ring[k - 1];
    const auto& b = ring[k];
    std::size_t i = 0, j = 0;
    while (i + 1 < a.size() || j + 1 < b.size()) {
      const bool advance_inner =
          j + 1 >= b.size() || (i + 1 < a.size() && angle[k - 1][i + 1] < angle[k][j + 1]);
      if (advance_inner) {
        m.cells.insert(m.cells.end(), {a[i], a[i + 1], b[j]});
        ++i;
      } else {
        m.cells.insert(m.cells.end(), {a[i], b[j + 1], b[j]});
        ++j;
      }
    }
  }
  return m;
}

}  // namespace

Mesh generate_mesh(const DomainSpec& domain, double h, const MeshOptions& options) {
  if (!(h > 0.0) || !(h < domain.R_Omega / 4.0)) {
    throw std::invalid_argument("generate_mesh: need 0 < h < R_Omega/4");
  }
  if (options.grading < 0.0 || options.grading >= 2.0) {
    throw std::invalid_argument("generate_mesh: grading must lie in [0, 2)");
  }
  Mesh m;
  switch (domain.kind) {
    case DomainKind::interval: m = interval_mesh(domain, h, options.grading); break;
    case DomainKind::tangent_disk: m = tangent_disk_mesh(domain, h, options.grading); break;
    case DomainKind::half_disk: m = half_disk_mesh(domain, h, options.grading); break;
  }
  finalize(m, options.max_aspect);
  return m;
}

Mesh refine_nested(const Mesh& coarse) {
  Mesh m;
  m.domain = coarse.domain;
  m.dim = coarse.dim;
  m.level = coarse.level + 1;
  m.vertices = coarse.vertices;
  if (coarse.dim == 1) {
    // keep left-to-right order of the vertex numbering
    std::vector<Point> v;
    v.reserve(2 * coarse.vertices.size());
    for (int c = 0; c < coarse.num_cells(); ++c) {
      const auto e = coarse.cell(c);
      const Point& a = coarse.vertices[e[0]];
      const Point& b = coarse.vertices[e[1]];
      if (c == 0) v.push_back(a);
      v.push_back({0.5 * (a[0] + b[0]), 0.0});
      v.push_back(b);
    }
    m.vertices = v;
    m.cells.clear();
    for (int j = 0; j + 1 < static_cast<int>(v.size()); ++j) {
      m.cells.push_back(j);
      m.cells.push_back(j + 1);
    }
  } else {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const Point& pa = coarse.vertices[a];
      const Point& pb = coarse.vertices[b];
      const int id = static_cast<int>(m.vertices.size());
      m.vertices.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
      mid.emplace(key, id);
      return id;
    };
    for (int c = 0; c < coarse.num_cells(); ++c) {
      const auto v = coarse.cell(c);
      const int ab = midpoint(v[0], v[1]);
      const int bc = midpoint(v[1], v[2]);
      const int ca = midpoint(v[2], v[0]);
      m.cells.insert(m.cells.end(), {v[0], ab, ca, ab, v[1], bc, ca, bc, v[2], ab, bc, ca});
    }
  }
  finalize(m, std::numeric_limits<double>::infinity());
  return m;
}

BoundaryClassification classify_boundary(const Mesh& mesh) {
  BoundaryClassification out;
  const double near = 4.0 * mesh.h;
  for (const auto& f : mesh.facets) {
    out.gamma0.push_back(f.x_dot_nu >= -tol_geom ? 1 : 0);
    out.x_dot_nu.push_back(f.x_dot_nu);
    out.xnu_integral.push_back(f.xnu_integral);
    out.r2_integral.push_back(f.r2_integral);
    const double r2 = norm2(f.centroid);
    if (mesh.dim == 2 && r2 > 0.0 && std::sqrt(r2) < near) {
      out.max_origin_ratio = std::max(out.max_origin_ratio, std::abs(f.x_dot_nu) / r2);
    }
  }
  return out;
}

void write_mesh(std::ostream& os, const Mesh& m) {
  os << "# hardylab mesh v1\n";
  os << "DOMAIN " << to_string(m.domain.kind) << ' ' << std::setprecision(17) << m.domain.size << '\n';
  os << "DIM " << m.dim << '\n';
  os << "VERTICES " << m.num_vertices() << '\n';
  for (const auto& v : m.vertices) os << v[0] << ' ' << v[1] << '\n';
  os << "CELLS " << m.num_cells() << '\n';
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto v = m.cell(c);
    for (int k = 0; k <= m.dim; ++k) os << v[k] << (k == m.dim ? '\n' : ' ');
  }
  os << "BOUNDARY " << m.facets.size() << '\n';
  for (std::size_t i = 0; i < m.facets.size(); ++i) {
    const auto& f = m.facets[i];
    os << i << ' ' << f.vertices[0] << ' ' << f.vertices[1] << ' ' << f.cell << ' ' << f.normal[0] << ' '
       << f.normal[1] << ' ' << f.x_dot_nu << ' ' << (f.gamma0 ? 1 : 0) << '\n';
  }
}

Mesh read_mesh(std::istream& is) {
  std::string line, tag;
  Mesh m;
  auto expect = [&](const char* want) {
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      ls >> tag;
      if (tag != want) throw std::runtime_error(std::string("read_mesh: expected section ") + want);
      return ls;
    }
    throw std::runtime_error(std::string("read_mesh: missing section ") + want);
  };
  {
    auto ls = expect("DOMAIN");
    std::string kind;
    double size = 0.0;
    ls >> kind >> size;
    m.domain = build_domain(parse_domain_kind(kind), size);
  }
  expect("DIM") >> m.dim;
  std::size_t n = 0;
  expect("VERTICES") >> n;
  m.vertices.resize(n);
  for (auto& v : m.vertices) is >> v[0] >> v[1];
  expect("CELLS") >> n;
  m.cells.resize(n * (m.dim + 1));
  for (auto& c : m.cells) is >> c;
  if (!is) throw std::runtime_error("read_mesh: truncated input");
  finalize(m, std::numeric_limits<double>::infinity());
  return m;
}

}  // namespace hardylab
