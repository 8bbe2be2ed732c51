#pragma once

#include <array>
#include <functional>
#include <vector>

#include "hardylab/mesh.hpp"
#include "hardylab/quadrature.hpp"
#include "hardylab/types.hpp"

namespace hardylab {

/// Integrand of a P1 bilinear form on one cell.
struct FormKernel {
  enum class Kind {
    weighted_stiffness,  ///< int w(x) grad phi_i . grad phi_j
    weighted_mass,       ///< int w(x) phi_i phi_j
    shifted_gradient,    ///< int (grad phi_i + a(x) phi_i) . (grad phi_j + a(x) phi_j)
  };
  Kind kind = Kind::weighted_stiffness;
  std::function<double(const Point&)> weight;  ///< empty means w = 1
  std::function<Point(const Point&)> drift;    ///< a(x) for shifted_gradient
};

/// Local matrices, row-major (dim+1) x (dim+1), one per cell.
using ElementMatrix = std::array<double, 9>;

/// P1 basis gradients on cell c (constant per cell).
std::array<Point, 3> p1_gradients(const Mesh& mesh, int c);

std::vector<ElementMatrix> element_matrices(const Mesh& mesh, const QuadRule& rule,
                                            const FormKernel& form, Exec exec);

/// Scatter element matrices into the interior-dof sparse matrix in cell order.
SpMat scatter(const Mesh& mesh, const std::vector<ElementMatrix>& local);

SpMat assemble_form(const Mesh& mesh, const QuadRule& rule, const FormKernel& form, Exec exec);

/// y = A x for symmetric A.
void symv(const SpMat& A, const Vec& x, Vec& y, Exec exec);
/// y = A x for a row-major A.
void spmv(const RowSpMat& A, const Vec& x, Vec& y, Exec exec);

double dot(const Vec& x, const Vec& y, Exec exec);
/// u^T A u for symmetric A.
double quad_form(const SpMat& A, const Vec& u, Exec exec);

/// b_i = int f phi_i over all cells, i over interior dofs.
Vec load_vector(const Mesh& mesh, const QuadRule& rule, const ScalarField& f, Exec exec);

}  // namespace hardylab
