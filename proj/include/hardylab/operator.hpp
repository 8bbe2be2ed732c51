#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "hardylab/kernels.hpp"
#include "hardylab/mesh.hpp"
#include "hardylab/types.hpp"

namespace hardylab {

struct AssemblyOptions {
  /// Degree of exactness of the cell rule; 0 picks 10 in 1D and 4 in 2D.
  int quad_order = 0;
  /// Regularization of the singular weight, 1/(|x|^2 + delta). Sensitivity
  /// experiments only; 0 reproduces the unregularized form.
  double delta = 0.0;
  Exec exec = Exec::parallel;
};

/// Sparse bilinear forms of the Hardy operator -Laplace - lambda/|x|^2 on the
/// interior dofs of a P1 mesh.
///
///   K      int grad phi_i . grad phi_j
///   M      int phi_i phi_j
///   W      int phi_i phi_j / |x|^2
///   W_log  int phi_i phi_j / (|x|^2 log^2(R/|x|))
///   K_x2   int |x|^2 grad phi_i . grad phi_j
///   G      int (grad phi_i + a phi_i) . (grad phi_j + a phi_j),
///          a(x) = (N/2) x/|x|^2 - e_N/x_N
///
/// `flux_map` takes interior dof values to the outward normal derivative on
/// each boundary facet (P1: one value per facet, from the adjacent cell).
class OperatorSet {
 public:
  OperatorSet(std::shared_ptr<const Mesh> mesh, const AssemblyOptions& options);

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  [[nodiscard]] int dofs() const { return mesh_->num_dofs(); }
  [[nodiscard]] int dim() const { return mesh_->dim; }
  [[nodiscard]] const QuadRule& rule() const { return rule_; }
  [[nodiscard]] Exec exec() const { return exec_; }

  /// int |x|^eps grad phi_i . grad phi_j, built on first use and cached.
  [[nodiscard]] const SpMat& K_eps(double eps) const;

  /// K - lambda W.
  [[nodiscard]] SpMat hardy_matrix(double lambda) const;

  [[nodiscard]] Vec load(const ScalarField& f) const;
  [[nodiscard]] Vec interpolate(const ScalarField& f) const;
  /// Integral of f over the discrete domain with the cell rule.
  [[nodiscard]] double integrate(const ScalarField& f) const;
  /// Value of the P1 function with dof vector u at every vertex.
  [[nodiscard]] Vec vertex_values(const Vec& u) const;

  SpMat K, M, W, W_log, K_x2, G;
  RowSpMat flux_map;
  double lambda_N = 0.0;     ///< N^2/4
  double lambda_star = 0.0;  ///< (N-2)^2/4
  int quad_order = 0;
  double delta = 0.0;
  int clamped_points = 0;  ///< W_log quadrature points clamped to |x| = R(1 - 1e-8)

 private:
  std::shared_ptr<const Mesh> mesh_;
  QuadRule rule_;
  Exec exec_ = Exec::parallel;
  struct Cache {
    std::mutex lock;
    std::map<double, SpMat> k_eps;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

OperatorSet assemble(Mesh mesh, const AssemblyOptions& options = {});
OperatorSet assemble(std::shared_ptr<const Mesh> mesh, const AssemblyOptions& options = {});

/// u^T (K - lambda W) u. Rejects lambda > lambda(N).
double hardy_form(const OperatorSet& ops, double lambda, const Vec& u);

/// u^T G u + (lambda(N) - lambda) u^T W u; equals hardy_form up to quadrature.
double factored_form(const OperatorSet& ops, double lambda, const Vec& u);

/// Outward normal derivative per boundary facet.
Vec boundary_flux(const OperatorSet& ops, const Vec& u);

/// sum over facets of int (x . nu) dsigma * flux^2; facets outside Gamma_0
/// are skipped when `gamma0_only`.
double xnu_flux_energy(const Mesh& mesh, const Vec& flux, bool gamma0_only = false);
/// sum over facets of int |x|^2 dsigma * flux^2.
double r2_flux_energy(const Mesh& mesh, const Vec& flux);

/// Partial sums of the factored form restricted to {|x| >= eps}, evaluated
/// directly at the cell quadrature points.
struct TruncatedRow {
  double eps;
  double value;
};
std::vector<TruncatedRow> truncated_factored_table(const OperatorSet& ops, double lambda, const Vec& u,
                                                   const std::vector<double>& eps_list);

/// Coordinate text export: one "row col value" line per stored entry.
void export_matrix(std::ostream& os, const SpMat& A);

}  // namespace hardylab
