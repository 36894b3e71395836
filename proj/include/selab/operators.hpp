#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "selab/grid.hpp"

namespace selab::operators {

using grid::Mesh;
using grid::MeshPtr;

// Element-wise constant matrix coefficient with certified ellipticity bounds.
// Membership in M(alpha, beta, Omega): A xi . xi >= alpha |xi|^2 and
// A^{-1} xi . xi >= beta^{-1} |xi|^2 for every element matrix.
class CoefficientField {
public:
  MeshPtr mesh;
  std::vector<double> data;  // per element: 1 entry in 1D, 4 row-major in 2D
  double alpha = 0.0;
  double beta = 0.0;

  int dim() const { return mesh->dim; }
  int entries_per_element() const { return mesh->dim == 1 ? 1 : 4; }
  const double* matrix(int e) const { return data.data() + e * entries_per_element(); }

  bool is_symmetric(double tol = 1e-13) const {
    if (mesh->dim == 1) return true;
    for (int e = 0; e < mesh->element_count(); ++e) {
      const double* m = matrix(e);
      double scale = std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2]) + std::abs(m[3]);
      if (std::abs(m[1] - m[2]) > tol * std::max(1.0, scale)) return false;
    }
    return true;
  }
};

namespace detail {

// smallest/largest eigenvalue of the symmetric part of a 2x2 matrix
inline std::pair<double, double> sym_eigs(const double* m) {
  double s11 = m[0], s22 = m[3], s12 = 0.5 * (m[1] + m[2]);
  double mean = 0.5 * (s11 + s22);
  double rad = std::sqrt(0.25 * (s11 - s22) * (s11 - s22) + s12 * s12);
  return {mean - rad, mean + rad};
}

inline std::array<double, 4> inverse2(const double* m) {
  double det = m[0] * m[3] - m[1] * m[2];
  if (det == 0.0) throw Error("not coercive");
  return {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
}

}  // namespace detail

// Certify the M(alpha, beta, Omega) constants from the element matrices:
// alpha from the symmetric part of A, beta from the symmetric part of A^{-1}.
inline std::pair<double, double> check_ellipticity(const CoefficientField& A) {
  double alpha = kInf, beta = 0.0;
  const Mesh& mesh = *A.mesh;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double* m = A.matrix(e);
    if (mesh.dim == 1) {
      if (!(m[0] > 0.0)) throw Error("not coercive");
      alpha = std::min(alpha, m[0]);
      beta = std::max(beta, m[0]);
    } else {
      for (int k = 0; k < 4; ++k)
        if (!std::isfinite(m[k])) throw Error("not coercive");
      auto [lo, hi] = detail::sym_eigs(m);
      if (!(lo > 0.0)) throw Error("not coercive");
      alpha = std::min(alpha, lo);
      auto inv = detail::inverse2(m);
      auto [ilo, ihi] = detail::sym_eigs(inv.data());
      if (!(ilo > 0.0)) throw Error("not coercive");
      beta = std::max(beta, 1.0 / ilo);
    }
  }
  return {alpha, beta};
}

inline CoefficientField constant_coefficient(MeshPtr mesh, double a) {
  CoefficientField A;
  A.mesh = std::move(mesh);
  int per = A.entries_per_element();
  A.data.assign(per * A.mesh->element_count(), 0.0);
  for (int e = 0; e < A.mesh->element_count(); ++e) {
    if (per == 1) {
      A.data[e] = a;
    } else {
      A.data[4 * e + 0] = a;
      A.data[4 * e + 3] = a;
    }
  }
  std::tie(A.alpha, A.beta) = check_ellipticity(A);
  return A;
}

inline CoefficientField matrix_coefficient(MeshPtr mesh, const std::array<double, 4>& m) {
  if (mesh->dim != 2) throw Error("matrix coefficient requires a 2D mesh");
  CoefficientField A;
  A.mesh = std::move(mesh);
  A.data.resize(4 * A.mesh->element_count());
  for (int e = 0; e < A.mesh->element_count(); ++e)
    for (int k = 0; k < 4; ++k) A.data[4 * e + k] = m[k];
  std::tie(A.alpha, A.beta) = check_ellipticity(A);
  return A;
}

// Scalar coefficient a(x) I sampled at element midpoints (1D) / centroids (2D).
inline CoefficientField scalar_coefficient(MeshPtr mesh,
                                           const std::function<double(double, double)>& a) {
  CoefficientField A;
  A.mesh = std::move(mesh);
  const Mesh& m = *A.mesh;
  int per = A.entries_per_element();
  A.data.assign(per * m.element_count(), 0.0);
  for (int e = 0; e < m.element_count(); ++e) {
    const int* v = m.element_vertices(e);
    double cx = 0.0, cy = 0.0;
    for (int k = 0; k <= m.dim; ++k) {
      cx += m.vx[v[k]];
      if (m.dim == 2) cy += m.vy[v[k]];
    }
    cx /= (m.dim + 1);
    cy /= (m.dim + 1);
    double val = a(cx, cy);
    if (per == 1) {
      A.data[e] = val;
    } else {
      A.data[4 * e + 0] = val;
      A.data[4 * e + 3] = val;
    }
  }
  std::tie(A.alpha, A.beta) = check_ellipticity(A);
  return A;
}

// Symmetric sparse operator over interior dofs, CSR storage.
class SparseSpdOperator {
public:
  int n = 0;
  std::vector<int> row_ptr, col;
  std::vector<double> val;

  void apply(const double* x, double* y) const {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
      y[i] = s;
    }
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(n);
    apply(x.data(), y.data());
    return y;
  }

  double diagonal(int i) const {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (col[k] == i) return val[k];
    return 0.0;
  }

  double& at(int i, int j) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (col[k] == j) return val[k];
    throw Error("entry outside sparsity pattern");
  }

  double quadratic_form(const std::vector<double>& u) const {
    std::vector<double> y = apply(u);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += u[i] * y[i];
    return s;
  }

  static SparseSpdOperator from_triplets(int n, std::vector<std::array<int, 2>>& idx,
                                         std::vector<double>& values) {
    std::vector<int> order(idx.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (idx[a][0] != idx[b][0]) return idx[a][0] < idx[b][0];
      return idx[a][1] < idx[b][1];
    });
    SparseSpdOperator op;
    op.n = n;
    op.row_ptr.assign(n + 1, 0);
    for (size_t p = 0; p < order.size();) {
      size_t q = p;
      double s = 0.0;
      while (q < order.size() && idx[order[q]][0] == idx[order[p]][0] &&
             idx[order[q]][1] == idx[order[p]][1]) {
        s += values[order[q]];
        ++q;
      }
      op.col.push_back(idx[order[p]][1]);
      op.val.push_back(s);
      op.row_ptr[idx[order[p]][0] + 1]++;
      p = q;
    }
    for (int i = 0; i < n; ++i) op.row_ptr[i + 1] += op.row_ptr[i];
    return op;
  }
};

// K[i][j] = int A grad phi_j . grad phi_i over interior basis functions,
// exact per-element formulas for P1.
inline SparseSpdOperator assemble_stiffness(const MeshPtr& mesh, const CoefficientField& A) {
  if (A.mesh != mesh) throw Error("coefficient field lives on a different mesh");
  const Mesh& m = *mesh;
  std::vector<std::array<int, 2>> idx;
  std::vector<double> values;
  idx.reserve(m.element_count() * (m.dim + 1) * (m.dim + 1));
  values.reserve(idx.capacity());
  std::array<std::array<double, 2>, 3> g;
  for (int e = 0; e < m.element_count(); ++e) {
    const int* v = m.element_vertices(e);
    m.hat_gradients(e, g);
    const double* mat = A.matrix(e);
    double meas = m.element_measure(e);
    for (int a = 0; a <= m.dim; ++a) {
      int ia = m.interior_index[v[a]];
      if (ia < 0) continue;
      for (int b = 0; b <= m.dim; ++b) {
        int ib = m.interior_index[v[b]];
        if (ib < 0) continue;
        double k;
        if (m.dim == 1) {
          k = mat[0] * g[a][0] * g[b][0] * meas;
        } else {
          double Agx = mat[0] * g[b][0] + mat[1] * g[b][1];
          double Agy = mat[2] * g[b][0] + mat[3] * g[b][1];
          k = (g[a][0] * Agx + g[a][1] * Agy) * meas;
        }
        idx.push_back({ia, ib});
        values.push_back(k);
      }
    }
  }
  return SparseSpdOperator::from_triplets(m.interior_count(), idx, values);
}

// Diagonal entry = int phi_i dx, over all vertices (boundary included).
inline std::vector<double> assemble_lumped_mass(const MeshPtr& mesh) {
  const Mesh& m = *mesh;
  std::vector<double> d(m.vertex_count(), 0.0);
  for (int e = 0; e < m.element_count(); ++e) {
    const int* v = m.element_vertices(e);
    double share = m.element_measure(e) / (m.dim + 1);
    for (int k = 0; k <= m.dim; ++k) d[v[k]] += share;
  }
  return d;
}

// Jacobi-preconditioned conjugate gradients, zero initial guess, fixed
// iteration order. Relative residual <= rel_tol on exit.
inline std::vector<double> solve_spd(const SparseSpdOperator& K, const std::vector<double>& b,
                                     double rel_tol = 1e-12, int* iterations_out = nullptr) {
  const int n = K.n;
  if (static_cast<int>(b.size()) != n) throw Error("invalid load");
  for (double v : b)
    if (!std::isfinite(v)) throw Error("invalid load");

  std::vector<double> x(n, 0.0);
  double bnorm2 = 0.0;
  for (double v : b) bnorm2 += v * v;
  if (iterations_out) *iterations_out = 0;
  if (bnorm2 == 0.0) return x;

  std::vector<double> inv_diag(n);
  for (int i = 0; i < n; ++i) {
    double d = K.diagonal(i);
    if (!(d > 0.0)) throw Error("matrix not positive definite");
    inv_diag[i] = 1.0 / d;
  }

  std::vector<double> r(b), z(n), p(n), Ap(n);
  for (int i = 0; i < n; ++i) z[i] = r[i] * inv_diag[i];
  p = z;
  double rz = 0.0;
  for (int i = 0; i < n; ++i) rz += r[i] * z[i];
  const double target2 = rel_tol * rel_tol * bnorm2;
  const long max_iter = 50L * n;

  long it = 0;
  double rnorm2 = bnorm2;
  while (rnorm2 > target2) {
    if (it++ >= max_iter) throw Error("CG stagnation");
    K.apply(p.data(), Ap.data());
    double pAp = 0.0;
    for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    if (!(pAp > 0.0)) throw Error("matrix not positive definite");
    double alpha = rz / pAp;
    rnorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
      rnorm2 += r[i] * r[i];
    }
    if (rnorm2 <= target2) break;
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) {
      z[i] = r[i] * inv_diag[i];
      rz_new += r[i] * z[i];
    }
    double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (iterations_out) *iterations_out = static_cast<int>(it);
  return x;
}

// interior dof vector -> full vertex vector (zero on the boundary)
inline std::vector<double> prolong(const Mesh& mesh, const std::vector<double>& interior) {
  std::vector<double> full(mesh.vertex_count(), 0.0);
  for (int i = 0; i < mesh.interior_count(); ++i) full[mesh.interior_vertices[i]] = interior[i];
  return full;
}

inline std::vector<double> restrict_interior(const Mesh& mesh, const std::vector<double>& full) {
  std::vector<double> interior(mesh.interior_count());
  for (int i = 0; i < mesh.interior_count(); ++i) interior[i] = full[mesh.interior_vertices[i]];
  return interior;
}

}  // namespace selab::operators
