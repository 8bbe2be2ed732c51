#include "hardylab/operator.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace hardylab {

namespace {

double norm2(const Point& x) { return x[0] * x[0] + x[1] * x[1]; }

double checked_r2(const Point& x) {
  const double r2 = norm2(x);
  if (r2 == 0.0) throw std::runtime_error("quadrature point coincides with the origin");
  return r2;
}

double x_N(const Point& x, int dim) { return x[dim - 1]; }

constexpr double log_clamp = 1e-8;

/// a(x) = (N/2) x/|x|^2 - e_N / x_N
Point factored_drift(const Point& x, int dim) {
  const double r2 = checked_r2(x);
  const double xn = x_N(x, dim);
  if (!(xn > 0.0)) throw std::runtime_error("quadrature point on the plane x_N = 0");
  const double half_n = 0.5 * dim;
  Point a{half_n * x[0] / r2, half_n * x[1] / r2};
  a[dim - 1] -= 1.0 / xn;
  return a;
}

}  // namespace

OperatorSet::OperatorSet(std::shared_ptr<const Mesh> mesh, const AssemblyOptions& options)
    : mesh_(std::move(mesh)), exec_(options.exec) {
  const Mesh& m = *mesh_;
  const int dim = m.dim;
  quad_order = options.quad_order > 0 ? options.quad_order : (dim == 1 ? 10 : 4);
  if (quad_order < 2) throw std::invalid_argument("assemble: quad_order must be >= 2");
  if (options.delta < 0.0) throw std::invalid_argument("assemble: delta must be >= 0");
  delta = options.delta;
  rule_ = simplex_rule(dim, quad_order);
  lambda_N = 0.25 * dim * dim;
  lambda_star = 0.25 * (dim - 2) * (dim - 2);

  const double R = m.domain.R_Omega;
  const double dlt = delta;

  K = assemble_form(m, rule_, {FormKernel::Kind::weighted_stiffness, {}, {}}, exec_);
  M = assemble_form(m, rule_, {FormKernel::Kind::weighted_mass, {}, {}}, exec_);
  W = assemble_form(m, rule_,
                    {FormKernel::Kind::weighted_mass, [dlt](const Point& x) { return 1.0 / (checked_r2(x) + dlt); }, {}},
                    exec_);
  W_log = assemble_form(m, rule_,
                        {FormKernel::Kind::weighted_mass,
                         [R](const Point& x) {
                           const double r2 = checked_r2(x);
                           const double rho = std::min(std::sqrt(r2), R * (1.0 - log_clamp));
                           const double lg = std::log(R / rho);
                           return 1.0 / (rho * rho * lg * lg);
                         },
                         {}},
                        exec_);
  K_x2 = assemble_form(m, rule_, {FormKernel::Kind::weighted_stiffness, [](const Point& x) { return norm2(x); }, {}},
                       exec_);
  G = assemble_form(m, rule_,
                    {FormKernel::Kind::shifted_gradient, {}, [dim](const Point& x) { return factored_drift(x, dim); }},
                    exec_);

  clamped_points = 0;
  for (int c = 0; c < m.num_cells(); ++c) {
    for (const auto& b : rule_.bary) {
      if (std::sqrt(norm2(m.map(c, b))) > R * (1.0 - log_clamp)) ++clamped_points;
    }
  }

  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t f = 0; f < m.facets.size(); ++f) {
    const auto& facet = m.facets[f];
    const auto grad = p1_gradients(m, facet.cell);
    const auto v = m.cell(facet.cell);
    for (int k = 0; k <= dim; ++k) {
      const int d = m.dof[v[k]];
      if (d < 0) continue;
      trip.emplace_back(static_cast<int>(f), d, grad[k][0] * facet.normal[0] + grad[k][1] * facet.normal[1]);
    }
  }
  flux_map.resize(static_cast<Eigen::Index>(m.facets.size()), m.num_dofs());
  flux_map.setFromTriplets(trip.begin(), trip.end());
  flux_map.makeCompressed();
}

const SpMat& OperatorSet::K_eps(double eps) const {
  if (!(eps > 0.0)) throw std::invalid_argument("K_eps: exponent must be positive");
  std::lock_guard guard(cache_->lock);
  auto it = cache_->k_eps.find(eps);
  if (it != cache_->k_eps.end()) return it->second;
  SpMat k = assemble_form(*mesh_, rule_,
                          {FormKernel::Kind::weighted_stiffness,
                           [eps](const Point& x) { return std::pow(norm2(x), 0.5 * eps); }, {}},
                          exec_);
  return cache_->k_eps.emplace(eps, std::move(k)).first->second;
}

SpMat OperatorSet::hardy_matrix(double lambda) const {
  SpMat A = K - lambda * W;
  A.makeCompressed();
  return A;
}

Vec OperatorSet::load(const ScalarField& f) const { return load_vector(*mesh_, rule_, f, exec_); }

Vec OperatorSet::interpolate(const ScalarField& f) const {
  Vec u(dofs());
  for (int d = 0; d < dofs(); ++d) u[d] = f(mesh_->vertices[mesh_->dof_vertex[d]]);
  return u;
}

double OperatorSet::integrate(const ScalarField& f) const {
  const Mesh& m = *mesh_;
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const double vol = m.cell_measure(c);
    for (std::size_t q = 0; q < rule_.size(); ++q) s += rule_.weights[q] * vol * f(m.map(c, rule_.bary[q]));
  }
  return s;
}

Vec OperatorSet::vertex_values(const Vec& u) const {
  Vec out = Vec::Zero(mesh_->num_vertices());
  for (int d = 0; d < dofs(); ++d) out[mesh_->dof_vertex[d]] = u[d];
  return out;
}

OperatorSet assemble(Mesh mesh, const AssemblyOptions& options) {
  return OperatorSet(std::make_shared<const Mesh>(std::move(mesh)), options);
}

OperatorSet assemble(std::shared_ptr<const Mesh> mesh, const AssemblyOptions& options) {
  return OperatorSet(std::move(mesh), options);
}

double hardy_form(const OperatorSet& ops, double lambda, const Vec& u) {
  if (lambda > ops.lambda_N * (1.0 + 1e-14)) {
    throw std::invalid_argument("hardy_form: lambda exceeds lambda(N)");
  }
  return quad_form(ops.K, u, ops.exec()) - lambda * quad_form(ops.W, u, ops.exec());
}

double factored_form(const OperatorSet& ops, double lambda, const Vec& u) {
  return quad_form(ops.G, u, ops.exec()) + (ops.lambda_N - lambda) * quad_form(ops.W, u, ops.exec());
}

Vec boundary_flux(const OperatorSet& ops, const Vec& u) {
  Vec y;
  spmv(ops.flux_map, u, y, ops.exec());
  return y;
}

double xnu_flux_energy(const Mesh& mesh, const Vec& flux, bool gamma0_only) {
  double s = 0.0;
  for (std::size_t f = 0; f < mesh.facets.size(); ++f) {
    const auto& facet = mesh.facets[f];
    if (gamma0_only && !facet.gamma0) continue;
    s += facet.xnu_integral * flux[static_cast<Eigen::Index>(f)] * flux[static_cast<Eigen::Index>(f)];
  }
  return s;
}

double r2_flux_energy(const Mesh& mesh, const Vec& flux) {
  double s = 0.0;
  for (std::size_t f = 0; f < mesh.facets.size(); ++f) {
    s += mesh.facets[f].r2_integral * flux[static_cast<Eigen::Index>(f)] * flux[static_cast<Eigen::Index>(f)];
  }
  return s;
}

std::vector<TruncatedRow> truncated_factored_table(const OperatorSet& ops, double lambda, const Vec& u,
                                                   const std::vector<double>& eps_list) {
  const Mesh& m = ops.mesh();
  const auto& rule = ops.rule();
  const Vec uv = ops.vertex_values(u);
  std::vector<TruncatedRow> rows;
  for (double eps : eps_list) rows.push_back({eps, 0.0});
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
      double val = 0.0;
      for (int k = 0; k <= m.dim; ++k) val += uv[v[k]] * rule.bary[q][k];
      const Point a = factored_drift(x, m.dim);
      const double g0 = gu[0] + a[0] * val, g1 = gu[1] + a[1] * val;
      const double integrand = g0 * g0 + g1 * g1 + (ops.lambda_N - lambda) * val * val / norm2(x);
      const double r = std::sqrt(norm2(x));
      for (auto& row : rows) {
        if (r >= row.eps) row.value += rule.weights[q] * vol * integrand;
      }
    }
  }
  return rows;
}

void export_matrix(std::ostream& os, const SpMat& A) {
  os << "# row col value (0-based, " << A.rows() << " x " << A.cols() << ")\n";
  os << std::setprecision(17);
  for (int j = 0; j < A.outerSize(); ++j) {
    for (SpMat::InnerIterator it(A, j); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  }
}

}  // namespace hardylab
