#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "selab/common.hpp"

namespace selab::grid {

// Simplicial mesh of (0,1) or (0,1)^2. 2D meshes are uniform right-triangle
// triangulations of an n x n square grid with all diagonals in the same
// direction, which keeps the Laplacian stiffness an M-matrix.
class Mesh {
public:
  int dim = 1;
  int cells_per_side = 0;
  double h = 0.0;  // max element diameter
  std::vector<double> vx, vy;          // vertex coordinates (vy empty in 1D)
  std::vector<int> elements;           // flat, dim+1 vertex ids per element
  std::vector<bool> boundary;          // per vertex
  std::vector<int> interior_index;     // vertex -> interior dof id, or -1
  std::vector<int> interior_vertices;  // interior dof id -> vertex

  int vertex_count() const { return static_cast<int>(vx.size()); }
  int element_count() const { return static_cast<int>(elements.size()) / (dim + 1); }
  int interior_count() const { return static_cast<int>(interior_vertices.size()); }

  const int* element_vertices(int e) const { return elements.data() + e * (dim + 1); }

  // grid spacing along each axis (equals h in 1D, h / sqrt(2) in 2D)
  double resolution() const { return 1.0 / cells_per_side; }

  double element_measure(int) const {
    double w = resolution();
    if (dim == 1) return w;
    return 0.5 * w * w;
  }

  double dist_boundary(double x, double y = 0.0) const {
    double d = std::min(x, 1.0 - x);
    if (dim == 2) d = std::min(d, std::min(y, 1.0 - y));
    return d;
  }

  // Element containing (x, y); points on shared facets resolve deterministically.
  int locate(double x, double y = 0.0) const {
    const int n = cells_per_side;
    int i = std::clamp(static_cast<int>(x * n), 0, n - 1);
    if (dim == 1) return i;
    int j = std::clamp(static_cast<int>(y * n), 0, n - 1);
    double xi = x * n - i, eta = y * n - j;
    int cell = i * n + j;
    return 2 * cell + (eta > xi ? 1 : 0);
  }

  // P1 hat values of the element's vertices at (x, y).
  void hat_values(int e, double x, double y, double* out) const {
    const int* v = element_vertices(e);
    if (dim == 1) {
      double t = (x - vx[v[0]]) / (vx[v[1]] - vx[v[0]]);
      out[0] = 1.0 - t;
      out[1] = t;
      return;
    }
    double x0 = vx[v[0]], y0 = vy[v[0]];
    double ax = vx[v[1]] - x0, ay = vy[v[1]] - y0;
    double bx = vx[v[2]] - x0, by = vy[v[2]] - y0;
    double det = ax * by - ay * bx;
    double l1 = ((x - x0) * by - (y - y0) * bx) / det;
    double l2 = (ax * (y - y0) - ay * (x - x0)) / det;
    out[0] = 1.0 - l1 - l2;
    out[1] = l1;
    out[2] = l2;
  }

  // Constant gradient of each vertex hat on element e; out holds dim+1 gradients.
  void hat_gradients(int e, std::array<std::array<double, 2>, 3>& out) const {
    const int* v = element_vertices(e);
    if (dim == 1) {
      double len = vx[v[1]] - vx[v[0]];
      out[0] = {-1.0 / len, 0.0};
      out[1] = {1.0 / len, 0.0};
      return;
    }
    double x0 = vx[v[0]], y0 = vy[v[0]];
    double ax = vx[v[1]] - x0, ay = vy[v[1]] - y0;
    double bx = vx[v[2]] - x0, by = vy[v[2]] - y0;
    double det = ax * by - ay * bx;
    out[1] = {by / det, -bx / det};
    out[2] = {-ay / det, ax / det};
    out[0] = {-out[1][0] - out[2][0], -out[1][1] - out[2][1]};
  }
};

using MeshPtr = std::shared_ptr<const Mesh>;

inline MeshPtr build_interval_mesh(int n) {
  if (n < 2) throw Error("no interior degrees of freedom");
  auto mesh = std::make_shared<Mesh>();
  mesh->dim = 1;
  mesh->cells_per_side = n;
  mesh->h = 1.0 / n;
  mesh->vx.resize(n + 1);
  for (int i = 0; i <= n; ++i) mesh->vx[i] = static_cast<double>(i) / n;
  mesh->elements.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    mesh->elements.push_back(i);
    mesh->elements.push_back(i + 1);
  }
  mesh->boundary.assign(n + 1, false);
  mesh->boundary[0] = mesh->boundary[n] = true;
  mesh->interior_index.assign(n + 1, -1);
  for (int i = 1; i < n; ++i) {
    mesh->interior_index[i] = static_cast<int>(mesh->interior_vertices.size());
    mesh->interior_vertices.push_back(i);
  }
  return mesh;
}

inline MeshPtr build_square_mesh(int n) {
  if (n < 2) throw Error("no interior degrees of freedom");
  auto mesh = std::make_shared<Mesh>();
  mesh->dim = 2;
  mesh->cells_per_side = n;
  mesh->h = std::sqrt(2.0) / n;
  const int m = n + 1;
  mesh->vx.resize(m * m);
  mesh->vy.resize(m * m);
  mesh->boundary.assign(m * m, false);
  mesh->interior_index.assign(m * m, -1);
  // vertices ordered lexicographically by (x, y)
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      int v = i * m + j;
      mesh->vx[v] = static_cast<double>(i) / n;
      mesh->vy[v] = static_cast<double>(j) / n;
      if (i == 0 || i == n || j == 0 || j == n) mesh->boundary[v] = true;
    }
  }
  for (int v = 0; v < m * m; ++v) {
    if (!mesh->boundary[v]) {
      mesh->interior_index[v] = static_cast<int>(mesh->interior_vertices.size());
      mesh->interior_vertices.push_back(v);
    }
  }
  mesh->elements.reserve(6 * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int v00 = i * m + j, v10 = (i + 1) * m + j;
      int v01 = i * m + j + 1, v11 = (i + 1) * m + j + 1;
      // lower (eta <= xi) then upper, diagonal v00 -> v11
      mesh->elements.insert(mesh->elements.end(), {v00, v10, v11});
      mesh->elements.insert(mesh->elements.end(), {v00, v11, v01});
    }
  }
  return mesh;
}

// Nodal P1 function; conforming functions vanish on boundary vertices.
class FeFunction {
public:
  FeFunction() = default;
  FeFunction(MeshPtr mesh, std::vector<double> values, bool conforming = true)
      : mesh_(std::move(mesh)), values_(std::move(values)), conforming_(conforming) {
    if (static_cast<int>(values_.size()) != mesh_->vertex_count())
      throw Error("value array does not match vertex count");
    if (conforming_) {
      for (int v = 0; v < mesh_->vertex_count(); ++v)
        if (mesh_->boundary[v] && values_[v] != 0.0)
          throw Error("conforming function must vanish on the boundary");
    }
  }

  static FeFunction zero(MeshPtr mesh, bool conforming = true) {
    return FeFunction(mesh, std::vector<double>(mesh->vertex_count(), 0.0), conforming);
  }

  const MeshPtr& mesh() const { return mesh_; }
  bool conforming() const { return conforming_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](int v) const { return values_[v]; }

  double value_at(double x, double y = 0.0) const {
    int e = mesh_->locate(x, y);
    double hats[3];
    mesh_->hat_values(e, x, y, hats);
    const int* v = mesh_->element_vertices(e);
    double s = 0.0;
    for (int k = 0; k <= mesh_->dim; ++k) s += hats[k] * values_[v[k]];
    return s;
  }

  double value_in_element(int e, double x, double y = 0.0) const {
    double hats[3];
    mesh_->hat_values(e, x, y, hats);
    const int* v = mesh_->element_vertices(e);
    double s = 0.0;
    for (int k = 0; k <= mesh_->dim; ++k) s += hats[k] * values_[v[k]];
    return s;
  }

private:
  MeshPtr mesh_;
  std::vector<double> values_;
  bool conforming_ = true;
};

inline FeFunction p1_interpolate(const MeshPtr& mesh,
                                 const std::function<double(double, double)>& f,
                                 bool conforming = true) {
  std::vector<double> vals(mesh->vertex_count());
  for (int v = 0; v < mesh->vertex_count(); ++v) {
    double y = mesh->dim == 2 ? mesh->vy[v] : 0.0;
    double fv = f(mesh->vx[v], y);
    if (!std::isfinite(fv)) throw Error("non-interpolable");
    vals[v] = (conforming && mesh->boundary[v]) ? 0.0 : fv;
  }
  return FeFunction(mesh, std::move(vals), conforming);
}

// Exact integral of |grad u|^2 for piecewise linears, then square root.
inline double h1_seminorm(const FeFunction& u) {
  const Mesh& mesh = *u.mesh();
  double acc = 0.0;
  if (mesh.dim == 1) {
    const double w = mesh.resolution();
    for (int e = 0; e < mesh.element_count(); ++e) {
      const int* v = mesh.element_vertices(e);
      double s = (u[v[1]] - u[v[0]]) / w;
      acc += s * s * w;
    }
  } else {
    std::array<std::array<double, 2>, 3> g;
    for (int e = 0; e < mesh.element_count(); ++e) {
      const int* v = mesh.element_vertices(e);
      mesh.hat_gradients(e, g);
      double gx = 0.0, gy = 0.0;
      for (int k = 0; k < 3; ++k) {
        gx += u[v[k]] * g[k][0];
        gy += u[v[k]] * g[k][1];
      }
      acc += (gx * gx + gy * gy) * mesh.element_measure(e);
    }
  }
  return std::sqrt(acc);
}

// Exact integral of u^2 for piecewise linears, then square root.
inline double l2_norm(const FeFunction& u) {
  const Mesh& mesh = *u.mesh();
  double acc = 0.0;
  if (mesh.dim == 1) {
    const double w = mesh.resolution();
    for (int e = 0; e < mesh.element_count(); ++e) {
      const int* v = mesh.element_vertices(e);
      double a = u[v[0]], b = u[v[1]];
      acc += w / 3.0 * (a * a + a * b + b * b);
    }
  } else {
    for (int e = 0; e < mesh.element_count(); ++e) {
      const int* v = mesh.element_vertices(e);
      double a = u[v[0]], b = u[v[1]], c = u[v[2]];
      acc += mesh.element_measure(e) / 6.0 * (a * a + b * b + c * c + a * b + a * c + b * c);
    }
  }
  return std::sqrt(acc);
}

// Exact L2 inner product of two piecewise linears.
inline double l2_inner(const FeFunction& u, const FeFunction& v) {
  if (u.mesh() != v.mesh()) throw Error("functions live on different meshes");
  const Mesh& mesh = *u.mesh();
  double acc = 0.0;
  if (mesh.dim == 1) {
    const double w = mesh.resolution();
    for (int e = 0; e < mesh.element_count(); ++e) {
      const int* vid = mesh.element_vertices(e);
      double a = u[vid[0]], b = u[vid[1]], c = v[vid[0]], d = v[vid[1]];
      acc += w / 6.0 * (2 * a * c + a * d + b * c + 2 * b * d);
    }
  } else {
    for (int e = 0; e < mesh.element_count(); ++e) {
      const int* vid = mesh.element_vertices(e);
      double s = 0.0, t = 0.0, dot = 0.0;
      for (int k = 0; k < 3; ++k) {
        s += u[vid[k]];
        t += v[vid[k]];
        dot += u[vid[k]] * v[vid[k]];
      }
      acc += mesh.element_measure(e) / 12.0 * (s * t + dot);
    }
  }
  return acc;
}

inline double l2_distance(const FeFunction& u, const FeFunction& v) {
  if (u.mesh() != v.mesh()) throw Error("functions live on different meshes");
  std::vector<double> d(u.values());
  for (size_t i = 0; i < d.size(); ++i) d[i] -= v.values()[i];
  return l2_norm(FeFunction(u.mesh(), std::move(d), false));
}

// CSV field dump: header x[,y],value, vertex order, 17 significant digits.
inline void write_field_csv(const FeFunction& u, std::ostream& os) {
  const Mesh& mesh = *u.mesh();
  char buf[96];
  os << (mesh.dim == 1 ? "x,value\n" : "x,y,value\n");
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.dim == 1)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", mesh.vx[v], u[v]);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", mesh.vx[v], mesh.vy[v], u[v]);
    os << buf;
  }
}

}  // namespace selab::grid
