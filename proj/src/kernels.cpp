#include "hardylab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>


namespace hardylab {

std::array<Point, 3> p1_gradients(const Mesh& mesh, int c) {
  const auto v = mesh.cell(c);
  std::array<Point, 3> g{};
  if (mesh.dim == 1) {
    const double x0 = mesh.vertices[v[0]][0], x1 = mesh.vertices[v[1]][0];
    g[0] = {1.0 / (x0 - x1), 0.0};
    g[1] = {1.0 / (x1 - x0), 0.0};
    return g;
  }
  const Point& p0 = mesh.vertices[v[0]];
  const Point& p1 = mesh.vertices[v[1]];
  const Point& p2 = mesh.vertices[v[2]];
  const double a2 = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  g[0] = {(p1[1] - p2[1]) / a2, (p2[0] - p1[0]) / a2};
  g[1] = {(p2[1] - p0[1]) / a2, (p0[0] - p2[0]) / a2};
  g[2] = {(p0[1] - p1[1]) / a2, (p1[0] - p0[0]) / a2};
  return g;
}

namespace {

ElementMatrix element_matrix(const Mesh& mesh, const QuadRule& rule, const FormKernel& form, int c) {
  const int nloc = mesh.dim + 1;
  const auto grad = p1_gradients(mesh, c);
  const double vol = mesh.cell_measure(c);
  ElementMatrix a{};
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& phi = rule.bary[q];
    const Point x = mesh.map(c, phi);
    const double wq = rule.weights[q] * vol;
    switch (form.kind) {
      case FormKernel::Kind::weighted_stiffness: {
        const double w = form.weight ? form.weight(x) : 1.0;
        for (int i = 0; i < nloc; ++i)
          for (int j = 0; j < nloc; ++j)
            a[i * 3 + j] += wq * w * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
        break;
      }
      case FormKernel::Kind::weighted_mass: {
        const double w = form.weight ? form.weight(x) : 1.0;
        for (int i = 0; i < nloc; ++i)
          for (int j = 0; j < nloc; ++j) a[i * 3 + j] += wq * w * phi[i] * phi[j];
        break;
      }
      case FormKernel::Kind::shifted_gradient: {
        const Point d = form.drift(x);
        for (int i = 0; i < nloc; ++i) {
          const Point gi{grad[i][0] + d[0] * phi[i], grad[i][1] + d[1] * phi[i]};
          for (int j = 0; j < nloc; ++j) {
            const Point gj{grad[j][0] + d[0] * phi[j], grad[j][1] + d[1] * phi[j]};
            a[i * 3 + j] += wq * (gi[0] * gj[0] + gi[1] * gj[1]);
          }
        }
        break;
      }
    }
  }
  // mirror the upper triangle so the assembled matrix is exactly symmetric
  for (int i = 0; i < nloc; ++i)
    for (int j = 0; j < i; ++j) a[i * 3 + j] = a[j * 3 + i];
  for (double e : a) {
    if (!std::isfinite(e)) throw std::runtime_error("non-finite element matrix entry in cell " + std::to_string(c));
  }
  return a;
}

}  // namespace

std::vector<ElementMatrix> element_matrices(const Mesh& mesh, const QuadRule& rule,
                                            const FormKernel& form, Exec exec) {
  const int nc = mesh.num_cells();
  std::vector<ElementMatrix> local(nc);
  if (exec == Exec::serial) {
    for (int c = 0; c < nc; ++c) local[c] = element_matrix(mesh, rule, form, c);
    return local;
  }
  // exceptions must not cross the parallel region
  std::string error;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < nc; ++c) {
    try {
      local[c] = element_matrix(mesh, rule, form, c);
    } catch (const std::exception& e) {
#pragma omp critical(hardylab_assembly_error)
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error(error);
  return local;
}

SpMat scatter(const Mesh& mesh, const std::vector<ElementMatrix>& local) {
  const int nloc = mesh.dim + 1;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(local.size() * nloc * nloc);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto v = mesh.cell(c);
    for (int i = 0; i < nloc; ++i) {
      const int di = mesh.dof[v[i]];
      if (di < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const int dj = mesh.dof[v[j]];
        if (dj < 0) continue;
        trip.emplace_back(di, dj, local[c][i * 3 + j]);
      }
    }
  }
  SpMat A(mesh.num_dofs(), mesh.num_dofs());
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

SpMat assemble_form(const Mesh& mesh, const QuadRule& rule, const FormKernel& form, Exec exec) {
  return scatter(mesh, element_matrices(mesh, rule, form, exec));
}

void symv(const SpMat& A, const Vec& x, Vec& y, Exec exec) {
  const int n = static_cast<int>(A.outerSize());
  y.resize(n);
  const int* outer = A.outerIndexPtr();
  const int* inner = A.innerIndexPtr();
  const double* val = A.valuePtr();
  if (exec == Exec::serial) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = outer[j]; k < outer[j + 1]; ++k) s += val[k] * x[inner[k]];
      y[j] = s;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = outer[j]; k < outer[j + 1]; ++k) s += val[k] * x[inner[k]];
    y[j] = s;
  }
}

void spmv(const RowSpMat& A, const Vec& x, Vec& y, Exec exec) {
  const int n = static_cast<int>(A.outerSize());
  y.resize(n);
  const int* outer = A.outerIndexPtr();
  const int* inner = A.innerIndexPtr();
  const double* val = A.valuePtr();
  if (exec == Exec::serial) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = outer[i]; k < outer[i + 1]; ++k) s += val[k] * x[inner[k]];
      y[i] = s;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = outer[i]; k < outer[i + 1]; ++k) s += val[k] * x[inner[k]];
    y[i] = s;
  }
}

double dot(const Vec& x, const Vec& y, Exec exec) {
  const Eigen::Index n = x.size();
  if (exec == Exec::serial) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  }
  constexpr Eigen::Index block = 2048;
  const Eigen::Index nb = (n + block - 1) / block;
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < nb; ++b) {
    const Eigen::Index end = std::min(n, (b + 1) * block);
    double s = 0.0;
    for (Eigen::Index i = b * block; i < end; ++i) s += x[i] * y[i];
    partial[b] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double quad_form(const SpMat& A, const Vec& u, Exec exec) {
  Vec au;
  symv(A, u, au, exec);
  return dot(u, au, exec);
}

Vec load_vector(const Mesh& mesh, const QuadRule& rule, const ScalarField& f, Exec exec) {
  const int nc = mesh.num_cells();
  const int nloc = mesh.dim + 1;
  std::vector<std::array<double, 3>> local(nc);
  auto cell_load = [&](int c) {
    std::array<double, 3> b{};
    const double vol = mesh.cell_measure(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double fx = f(mesh.map(c, rule.bary[q])) * rule.weights[q] * vol;
      for (int i = 0; i < nloc; ++i) b[i] += fx * rule.bary[q][i];
    }
    return b;
  };
  if (exec == Exec::serial) {
    for (int c = 0; c < nc; ++c) local[c] = cell_load(c);
  } else {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < nc; ++c) local[c] = cell_load(c);
  }
  Vec out = Vec::Zero(mesh.num_dofs());
  for (int c = 0; c < nc; ++c) {
    const auto v = mesh.cell(c);
    for (int i = 0; i < nloc; ++i) {
      const int d = mesh.dof[v[i]];
      if (d >= 0) out[d] += local[c][i];
    }
  }
  return out;
}

}  // namespace hardylab
