#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace hardylab::detail {

namespace {

/// nb[k] is the triangle across the edge opposite v[k], -1 on the hull.
struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;
  double cx, cy, r2;
  bool alive;
};

double orient(const Point& a, const Point& b, const Point& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

void circumcircle(const std::vector<Point>& p, Tri& t) {
  const double ax = p[t.v[0]][0], ay = p[t.v[0]][1];
  const double bx = p[t.v[1]][0] - ax, by = p[t.v[1]][1] - ay;
  const double cx = p[t.v[2]][0] - ax, cy = p[t.v[2]][1] - ay;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const double ux = (cy * b2 - by * c2) / d;
  const double uy = (bx * c2 - cx * b2) / d;
  t.cx = ax + ux;
  t.cy = ay + uy;
  t.r2 = ux * ux + uy * uy;
}

bool in_circle(const Tri& t, const Point& q) {
  const double dx = q[0] - t.cx, dy = q[1] - t.cy;
  return dx * dx + dy * dy < t.r2 * (1.0 - 1e-12);
}

int locate_by_scan(const std::vector<Tri>& tris, const std::vector<Point>& p, const Point& q, double tol) {
  for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
    const Tri& tr = tris[t];
    if (!tr.alive) continue;
    if (orient(p[tr.v[0]], p[tr.v[1]], q) >= -tol && orient(p[tr.v[1]], p[tr.v[2]], q) >= -tol &&
        orient(p[tr.v[2]], p[tr.v[0]], q) >= -tol) {
      return t;
    }
  }
  throw std::runtime_error("delaunay_triangulate: point location failed");
}

/// Insertion order: snake through a coarse grid so consecutive points are close.
std::vector<int> spatial_order(std::span<const Point> pts, double xmin, double ymin, double span) {
  const int n = static_cast<int>(pts.size());
  const int g = std::max(1, static_cast<int>(std::sqrt(n / 4.0)));
  std::vector<long> key(n);
  for (int i = 0; i < n; ++i) {
    const int gx = std::min(g - 1, static_cast<int>((pts[i][0] - xmin) / span * g));
    const int gy = std::min(g - 1, static_cast<int>((pts[i][1] - ymin) / span * g));
    const int col = (gy % 2) ? g - 1 - gx : gx;
    key[i] = static_cast<long>(gy) * g + col;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
  return order;
}

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Point> points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw std::invalid_argument("delaunay_triangulate: need at least 3 points");

  double xmin = points[0][0], xmax = xmin, ymin = points[0][1], ymax = ymin;
  for (const auto& q : points) {
    xmin = std::min(xmin, q[0]);
    xmax = std::max(xmax, q[0]);
    ymin = std::min(ymin, q[1]);
    ymax = std::max(ymax, q[1]);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
  const double mx = 0.5 * (xmin + xmax), my = 0.5 * (ymin + ymax);

  std::vector<Point> p(points.begin(), points.end());
  p.push_back({mx - 40.0 * span, my - 30.0 * span});
  p.push_back({mx + 40.0 * span, my - 30.0 * span});
  p.push_back({mx, my + 40.0 * span});

  std::vector<Tri> tris;
  tris.reserve(static_cast<std::size_t>(8 * n + 16));
  {
    Tri t{{n, n + 1, n + 2}, {-1, -1, -1}, 0, 0, 0, true};
    circumcircle(p, t);
    tris.push_back(t);
  }

  // orientation values below this count as collinear
  const double on_edge = 1e-13 * span * span;
  std::vector<int> bad, stack, cavity_mark;
  std::vector<int> created;
  std::unordered_map<int, int> by_first;
  int last = 0;

  for (int i : spatial_order(points, xmin, ymin, span)) {
    const Point& q = p[i];

    // visibility walk to the triangle containing q
    int t = last;
    for (std::size_t steps = 0;; ++steps) {
      if (steps > tris.size() + 16) {
        // the walk can cycle on nearly cocircular input; fall back to a scan
        t = locate_by_scan(tris, p, q, on_edge);
        break;
      }
      const Tri& tr = tris[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int kk = (k + static_cast<int>(steps)) % 3;
        if (orient(p[tr.v[(kk + 1) % 3]], p[tr.v[(kk + 2) % 3]], q) < -on_edge) {
          next = tr.nb[kk];
          break;
        }
      }
      if (next < 0) break;
      t = next;
    }

    // conflict region by flood fill through neighbours
    cavity_mark.resize(tris.size(), 0);
    bad.clear();
    stack.assign(1, t);
    cavity_mark[t] = 1;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      bad.push_back(c);
      for (int k = 0; k < 3; ++k) {
        const int o = tris[c].nb[k];
        if (o < 0 || cavity_mark[o]) continue;
        if (in_circle(tris[o], q)) {
          cavity_mark[o] = 1;
          stack.push_back(o);
        }
      }
    }

    // Round-off on nearly cocircular points can leave a cavity that is not
    // star-shaped from q. Shrink it (or grow it across q's own edge) until every
    // boundary edge sees q strictly on its left and no vertex repeats.
    for (bool changed = true; changed;) {
      changed = false;
      by_first.clear();
      for (int c : bad) {
        for (int k = 0; k < 3 && !changed; ++k) {
          const int o = tris[c].nb[k];
          if (o >= 0 && cavity_mark[o]) continue;
          const int a = tris[c].v[(k + 1) % 3], b = tris[c].v[(k + 2) % 3];
          if (orient(p[a], p[b], q) > 0.0 && by_first.emplace(a, c).second) continue;
          if (c == t) {
            if (o < 0) throw std::runtime_error("delaunay_triangulate: point on the outer hull");
            cavity_mark[o] = 1;
          } else {
            cavity_mark[c] = 0;
          }
          changed = true;
        }
        if (changed) break;
      }
      if (!changed) break;
      // keep the edge-connected part that contains t
      std::vector<int> pool;
      for (int c : bad) {
        if (cavity_mark[c]) pool.push_back(c);
        for (int k = 0; k < 3; ++k) {
          const int o = tris[c].nb[k];
          if (o >= 0 && cavity_mark[o] && std::find(pool.begin(), pool.end(), o) == pool.end()) pool.push_back(o);
        }
      }
      for (int c : pool) cavity_mark[c] = 0;
      bad.clear();
      stack.assign(1, t);
      cavity_mark[t] = 1;
      while (!stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        bad.push_back(c);
        for (int k = 0; k < 3; ++k) {
          const int o = tris[c].nb[k];
          if (o < 0 || cavity_mark[o]) continue;
          if (std::find(pool.begin(), pool.end(), o) != pool.end()) {
            cavity_mark[o] = 1;
            stack.push_back(o);
          }
        }
      }
    }

    created.clear();
    by_first.clear();
    for (int c : bad) {
      for (int k = 0; k < 3; ++k) {
        const int o = tris[c].nb[k];
        if (o >= 0 && cavity_mark[o]) continue;
        const int a = tris[c].v[(k + 1) % 3], b = tris[c].v[(k + 2) % 3];
        Tri nt{{a, b, i}, {-1, -1, o}, 0, 0, 0, true};
        circumcircle(p, nt);
        const int id = static_cast<int>(tris.size());
        tris.push_back(nt);
        if (o >= 0) {
          for (int j = 0; j < 3; ++j) {
            if (tris[o].nb[j] == c) tris[o].nb[j] = id;
          }
        }
        created.push_back(id);
        by_first[a] = id;
      }
    }
    // (a, b, q) meets the new triangle starting at b across the edge (b, q)
    for (int id : created) {
      const int b = tris[id].v[1];
      const int other = by_first.at(b);
      tris[id].nb[0] = other;
      tris[other].nb[1] = id;
    }
    for (int c : bad) {
      tris[c].alive = false;
      cavity_mark[c] = 0;
    }
    last = created.front();
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    out.push_back(t.v);
  }
  return out;
}

}  // namespace hardylab::detail
