#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hardylab/quadrature.hpp"

namespace hardylab {

enum class DomainKind { interval, tangent_disk, half_disk };

std::string_view to_string(DomainKind kind);
DomainKind parse_domain_kind(std::string_view name);

/// Bounded domain with the origin on its boundary, contained in the upper
/// half space {x_N > 0}.
///
///   interval(L)      (0, L) in R
///   tangent_disk(r)  disk of radius r centred at (0, r), tangent to x_2 = 0 at 0
///   half_disk(r)     {|x| < r, x_2 > 0}
struct DomainSpec {
  int dim = 1;
  DomainKind kind = DomainKind::interval;
  double size = 1.0;  ///< L for the interval, r for the disks
  double R_Omega = 1.0;
  bool star_shaped = true;
  bool origin_on_boundary = true;

  /// Exact Lebesgue measure of the analytic domain.
  [[nodiscard]] double measure() const;
  /// Signed level function: negative inside, zero on the boundary.
  [[nodiscard]] double level(const Point& x) const;
  /// Outward unit normal of the analytic boundary at a boundary point.
  [[nodiscard]] Point normal(const Point& x) const;
  /// Smooth cutoff that vanishes on the analytic boundary and is positive inside.
  [[nodiscard]] double bubble(const Point& x) const;
};

/// `shift` translates the shape along e_N; any nonzero shift moves the origin
/// off the boundary and is rejected.
DomainSpec build_domain(DomainKind kind, double size, double shift = 0.0);

struct MeshQualityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Boundary facet: an edge in 2D, an end point in 1D.
struct BoundaryFacet {
  std::array<int, 2> vertices{-1, -1};
  int cell = -1;           ///< adjacent cell
  Point normal{0.0, 0.0};  ///< outward unit normal from facet geometry
  double measure = 0.0;    ///< length in 2D, 1 in 1D
  Point centroid{0.0, 0.0};
  double x_dot_nu = 0.0;   ///< x . nu at the centroid (constant on a straight facet)
  double xnu_integral = 0.0;  ///< int_facet x . nu dsigma
  double r2_integral = 0.0;   ///< int_facet |x|^2 dsigma
  bool gamma0 = false;        ///< x . nu >= -tol_geom
};

/// Conforming P1 simplicial mesh. Degrees of freedom are the interior
/// vertices; every boundary vertex carries a homogeneous Dirichlet value.
struct Mesh {
  DomainSpec domain;
  int dim = 1;
  std::vector<Point> vertices;
  std::vector<int> cells;  ///< flattened, stride dim + 1
  std::vector<BoundaryFacet> facets;
  std::vector<char> on_boundary;
  std::vector<int> dof;         ///< vertex -> dof index, -1 on the boundary
  std::vector<int> dof_vertex;  ///< dof index -> vertex
  int origin_vertex = -1;
  double h = 0.0;  ///< max cell diameter
  int level = 0;   ///< number of nested refinements applied

  [[nodiscard]] int num_cells() const { return static_cast<int>(cells.size()) / (dim + 1); }
  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices.size()); }
  [[nodiscard]] int num_dofs() const { return static_cast<int>(dof_vertex.size()); }
  [[nodiscard]] std::span<const int> cell(int c) const {
    return {cells.data() + static_cast<std::size_t>(c) * (dim + 1), static_cast<std::size_t>(dim + 1)};
  }
  [[nodiscard]] double cell_measure(int c) const;
  [[nodiscard]] double cell_diameter(int c) const;
  [[nodiscard]] Point map(int c, const std::array<double, 3>& bary) const;
  /// Total measure of the discrete domain.
  [[nodiscard]] double measure() const;
};

inline constexpr double tol_geom = 1e-12;

struct MeshOptions {
  /// Geometric clustering exponent toward the origin; 0 disables grading.
  double grading = 0.0;
  /// Abort when a cell's aspect ratio exceeds this value.
  double max_aspect = 12.0;
};

/// Uniform grid in 1D, Delaunay triangulation (tangent disk) or ring
/// triangulation (half disk) in 2D. The origin is always a boundary vertex.
Mesh generate_mesh(const DomainSpec& domain, double h, const MeshOptions& options = {});

/// Midpoint subdivision. New boundary vertices stay on the coarse facets, so
/// the coarse P1 space is a subspace of the refined one.
Mesh refine_nested(const Mesh& coarse);

/// Per-facet boundary data for the control region Gamma_0 = {x . nu >= 0}.
struct BoundaryClassification {
  std::vector<char> gamma0;
  std::vector<double> x_dot_nu;
  std::vector<double> xnu_integral;
  std::vector<double> r2_integral;
  /// x . nu / |x|^2 on facets touching the origin region (diagnostic only).
  double max_origin_ratio = 0.0;
};

BoundaryClassification classify_boundary(const Mesh& mesh);

/// Aspect ratio of a cell: circumradius / (2 * inradius), equal to 1 for an
/// equilateral triangle.
double aspect_ratio(const Mesh& mesh, int c);

/// Plain-text serialization (VERTICES / CELLS / BOUNDARY sections).
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace hardylab
