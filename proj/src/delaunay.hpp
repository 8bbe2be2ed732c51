#pragma once

#include <array>
#include <span>
#include <vector>

#include "hardylab/quadrature.hpp"

namespace hardylab::detail {

/// Bowyer-Watson Delaunay triangulation of a point set whose convex hull has
/// no three collinear vertices. Triangles are returned counter-clockwise.
std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Point> points);

}  // namespace hardylab::detail
