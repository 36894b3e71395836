#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "selab/grid.hpp"
#include "selab/quadrature.hpp"

namespace selab::measures {

using grid::FeFunction;
using grid::Mesh;
using grid::MeshPtr;

using Density = std::function<double(double, double)>;

struct Sample {
  int elem;        // containing element
  double x, y;     // position
  double w;        // quadrature weight (includes cell measure)
  double f;        // density value
};

struct Atom {
  double x;
  double mass;
};

// Nonnegative Radon measure represented by its action on the P1 basis plus a
// density/atom descriptor. The load vector b_i = int phi_i d sigma is the
// single source of truth for solves; samples carry the density for nonlinear
// pairings. Measures are combinable only on a shared mesh and quadrature
// descriptor (identical sample point sets).
class DiscreteMeasure {
public:
  MeshPtr mesh;
  std::string descriptor;       // empty for purely atomic measures
  std::vector<Sample> samples;
  std::vector<Atom> atoms;      // 1D only
  std::vector<double> load;     // per vertex
  double mass = 0.0;            // +inf when mass_infinite
  bool mass_infinite = false;
  double core_margin = 0.0;     // > 0 after truncate_to_core

  bool is_zero() const {
    if (!atoms.empty()) return false;
    for (const Sample& s : samples)
      if (s.f != 0.0) return false;
    return true;
  }

  // int g d(sigma) over the quadrature representation
  double integrate(const std::function<double(double, double)>& g) const {
    double acc = 0.0;
    for (const Sample& s : samples) acc += s.w * s.f * g(s.x, s.y);
    for (const Atom& a : atoms) acc += a.mass * g(a.x, 0.0);
    return acc;
  }

  // int (u_h)^p d(sigma), with u evaluated in each sample's element
  double integrate_fe_power(const FeFunction& u, double p) const {
    double acc = 0.0;
    for (const Sample& s : samples) {
      if (s.f == 0.0) continue;
      double uv = u.value_in_element(s.elem, s.x, s.y);
      acc += s.w * s.f * std::pow(uv, p);
    }
    for (const Atom& a : atoms) acc += a.mass * std::pow(u.value_at(a.x), p);
    return acc;
  }

  void rebuild_load_from_samples() {
    load.assign(mesh->vertex_count(), 0.0);
    double hats[3];
    for (const Sample& s : samples) {
      if (s.f == 0.0) continue;
      mesh->hat_values(s.elem, s.x, s.y, hats);
      const int* v = mesh->element_vertices(s.elem);
      for (int k = 0; k <= mesh->dim; ++k) load[v[k]] += s.w * s.f * hats[k];
    }
    for (const Atom& a : atoms) {
      int e = mesh->locate(a.x);
      mesh->hat_values(e, a.x, 0.0, hats);
      const int* v = mesh->element_vertices(e);
      for (int k = 0; k <= mesh->dim; ++k) load[v[k]] += a.mass * hats[k];
    }
  }
};

namespace detail {

constexpr int kGradeDepth = 40;
constexpr int kGradePoints = 12;

// Append scaled Gauss points for [a, b] within element e (1D).
inline void append_gauss_1d(std::vector<Sample>& out, int e, double a, double b, int npts) {
  const auto rule = quadrature::gauss_legendre(npts);
  for (int q = 0; q < npts; ++q)
    out.push_back({e, a + (b - a) * rule.points[q], 0.0, (b - a) * rule.weights[q], 1.0});
}

// 1D quadrature layout with geometric grading (ratio 1/2, depth 40) toward
// domain endpoints in boundary cells; plain Gauss elsewhere, split at the
// distance-function kink x = 1/2.
inline std::vector<Sample> graded_points_1d(const Mesh& mesh, int plain_npts) {
  std::vector<Sample> pts;
  const int n = mesh.cells_per_side;
  for (int e = 0; e < n; ++e) {
    double xl = mesh.vx[e], xr = mesh.vx[e + 1];
    if (e == 0) {
      for (int k = kGradeDepth - 1; k >= 0; --k)
        append_gauss_1d(pts, e, xl + (xr - xl) * std::ldexp(1.0, -(k + 1)),
                        xl + (xr - xl) * std::ldexp(1.0, -k), kGradePoints);
    } else if (e == n - 1) {
      for (int k = 0; k < kGradeDepth; ++k)
        append_gauss_1d(pts, e, xr - (xr - xl) * std::ldexp(1.0, -k),
                        xr - (xr - xl) * std::ldexp(1.0, -(k + 1)), kGradePoints);
    } else if (xl < 0.5 && xr > 0.5) {
      append_gauss_1d(pts, e, xl, 0.5, plain_npts);
      append_gauss_1d(pts, e, 0.5, xr, plain_npts);
    } else {
      append_gauss_1d(pts, e, xl, xr, plain_npts);
    }
  }
  return pts;
}

struct P2 {
  double x, y;
};

// clip convex polygon against half-plane keep(p) >= 0
inline std::vector<P2> clip(const std::vector<P2>& poly,
                            const std::function<double(const P2&)>& keep) {
  std::vector<P2> out;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const P2& a = poly[i];
    const P2& b = poly[(i + 1) % n];
    double da = keep(a), db = keep(b);
    if (da >= 0) out.push_back(a);
    if ((da > 0 && db < 0) || (da < 0 && db > 0)) {
      double t = da / (da - db);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

inline void append_triangle_rule(std::vector<Sample>& out, const Mesh& mesh, const P2& p0,
                                 const P2& p1, const P2& p2) {
  double area = 0.5 * std::abs((p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x));
  if (area <= 0.0) return;
  for (const auto& tp : quadrature::triangle_rule_deg5()) {
    double x = tp.b0 * p0.x + tp.b1 * p1.x + tp.b2 * p2.x;
    double y = tp.b0 * p0.y + tp.b1 * p1.y + tp.b2 * p2.y;
    out.push_back({mesh.locate(x, y), x, y, area * tp.weight, 1.0});
  }
}

inline void append_polygon_rule(std::vector<Sample>& out, const Mesh& mesh,
                                const std::vector<P2>& poly) {
  for (size_t k = 1; k + 1 < poly.size(); ++k)
    append_triangle_rule(out, mesh, poly[0], poly[k], poly[k + 1]);
}

// panel decomposition of [0,1] graded toward touched endpoints
inline std::vector<std::pair<double, double>> axis_panels(bool lo, bool hi) {
  std::vector<std::pair<double, double>> p;
  if (!lo && !hi) {
    p.push_back({0.0, 1.0});
    return p;
  }
  if (lo) {
    double top = hi ? 0.5 : 1.0;
    for (int k = kGradeDepth - 1; k >= 0; --k)
      p.push_back({top * std::ldexp(1.0, -(k + 1)), top * std::ldexp(1.0, -k)});
  }
  if (hi) {
    double width = lo ? 0.5 : 1.0;
    for (int k = 0; k < kGradeDepth; ++k)
      p.push_back({1.0 - width * std::ldexp(1.0, -k), 1.0 - width * std::ldexp(1.0, -(k + 1))});
  }
  return p;
}

// 2D layout: boundary-adjacent square cells get tensor panels graded toward
// the touched sides; every panel is split along the cell diagonal so each
// piece lies in a single mesh triangle.
inline std::vector<Sample> graded_points_2d(const Mesh& mesh) {
  std::vector<Sample> pts;
  const int n = mesh.cells_per_side;
  const double w = mesh.resolution();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double x0 = i * w, y0 = j * w;
      bool bl = (i == 0), br = (i == n - 1), bb = (j == 0), bt = (j == n - 1);
      if (!(bl || br || bb || bt)) {
        // interior cell: plain degree-5 rule on the two triangles
        append_triangle_rule(pts, mesh, {x0, y0}, {x0 + w, y0}, {x0 + w, y0 + w});
        append_triangle_rule(pts, mesh, {x0, y0}, {x0 + w, y0 + w}, {x0, y0 + w});
        continue;
      }
      auto px = axis_panels(bl, br);
      auto py = axis_panels(bb, bt);
      for (const auto& [ax, bx] : px) {
        for (const auto& [ay, by] : py) {
          std::vector<P2> rect = {{x0 + ax * w, y0 + ay * w},
                                  {x0 + bx * w, y0 + ay * w},
                                  {x0 + bx * w, y0 + by * w},
                                  {x0 + ax * w, y0 + by * w}};
          // diagonal of the cell: (y - y0) - (x - x0) = 0
          auto lower = clip(rect, [&](const P2& p) { return (p.x - x0) - (p.y - y0); });
          auto upper = clip(rect, [&](const P2& p) { return (p.y - y0) - (p.x - x0); });
          append_polygon_rule(pts, mesh, lower);
          append_polygon_rule(pts, mesh, upper);
        }
      }
    }
  }
  return pts;
}

// int_a^b (c0 + c1 t) t^{-s} dt, exact; returns +inf when divergent (a = 0)
inline double power_piece(double c0, double c1, double a, double b, double s) {
  auto prim = [&](double p) -> double {
    if (a == 0.0) {
      if (p > 0.0) return std::pow(b, p) / p;
      return kInf;
    }
    if (p == 0.0) return std::log(b / a);
    if (std::abs(p) < 1e-6) {
      // (b^p - a^p)/p = exp(p m) 2 sinh(p d)/p, stable as p -> 0
      double m = 0.5 * (std::log(b) + std::log(a));
      double d = 0.5 * (std::log(b) - std::log(a));
      return std::exp(p * m) * 2.0 * std::sinh(p * d) / p;
    }
    return (std::pow(b, p) - std::pow(a, p)) / p;
  };
  double acc = 0.0;
  if (c0 != 0.0) {
    double t = prim(1.0 - s);
    if (t == kInf) return kInf;
    acc += c0 * t;
  }
  if (c1 != 0.0) {
    double t = prim(2.0 - s);
    if (t == kInf) return kInf;
    acc += c1 * t;
  }
  return acc;
}

// exact int over [a,b] of (linear hat piece) * dist(x, boundary)^{-s} in 1D
inline double hat_power_integral(double c0, double c1, double a, double b, double s) {
  double acc = 0.0;
  if (a < 0.5) {
    double bb = std::min(b, 0.5);
    acc += power_piece(c0, c1, a, bb, s);
  }
  if (b > 0.5) {
    double aa = std::max(a, 0.5);
    // t = 1 - x: phi = (c0 + c1) - c1 t over t in [1-b, 1-aa]
    double t = power_piece(c0 + c1, -c1, 1.0 - b, 1.0 - aa, s);
    acc = (acc == kInf || t == kInf) ? kInf : acc + t;
  }
  return acc;
}

}  // namespace detail

// Density measure with per-cell Gauss quadrature of f (default order 5).
inline DiscreteMeasure density_measure(const MeshPtr& mesh, const Density& f, int quad_order = 5) {
  DiscreteMeasure sigma;
  sigma.mesh = mesh;
  sigma.descriptor = "gauss" + std::to_string(quad_order);
  const Mesh& m = *mesh;
  if (m.dim == 1) {
    int npts = quadrature::points_for_degree(quad_order);
    const auto rule = quadrature::gauss_legendre(npts);
    const double w = m.resolution();
    sigma.samples.reserve(m.element_count() * npts);
    for (int e = 0; e < m.element_count(); ++e) {
      double xl = m.vx[m.element_vertices(e)[0]];
      for (int q = 0; q < npts; ++q)
        sigma.samples.push_back({e, xl + w * rule.points[q], 0.0, w * rule.weights[q], 1.0});
    }
  } else {
    const auto& rule =
        quad_order <= 2 ? quadrature::triangle_rule_deg2() : quadrature::triangle_rule_deg5();
    for (int e = 0; e < m.element_count(); ++e) {
      const int* v = m.element_vertices(e);
      double area = m.element_measure(e);
      for (const auto& tp : rule) {
        double x = tp.b0 * m.vx[v[0]] + tp.b1 * m.vx[v[1]] + tp.b2 * m.vx[v[2]];
        double y = tp.b0 * m.vy[v[0]] + tp.b1 * m.vy[v[1]] + tp.b2 * m.vy[v[2]];
        sigma.samples.push_back({e, x, y, area * tp.weight, 1.0});
      }
    }
  }
  for (Sample& s : sigma.samples) {
    s.f = f(s.x, s.y);
    if (!(s.f >= 0.0) || !std::isfinite(s.f)) throw Error("signed density rejected");
  }
  sigma.rebuild_load_from_samples();
  for (const Sample& s : sigma.samples) sigma.mass += s.w * s.f;
  return sigma;
}

// Density dist(x, boundary)^{-s}. Load by exact antiderivatives in 1D and by
// the graded quadrature in 2D; mass flagged infinite when s >= 1.
inline DiscreteMeasure boundary_power_density(const MeshPtr& mesh, double s) {
  if (s >= 2.0) throw Error("pairing divergent");
  DiscreteMeasure sigma;
  sigma.mesh = mesh;
  sigma.descriptor = "bpow-g" + std::to_string(detail::kGradeDepth);
  const Mesh& m = *mesh;
  sigma.samples = m.dim == 1 ? detail::graded_points_1d(m, 5) : detail::graded_points_2d(m);
  for (Sample& smp : sigma.samples) smp.f = std::pow(m.dist_boundary(smp.x, smp.y), -s);

  if (m.dim == 1) {
    // exact hat pairings
    sigma.load.assign(m.vertex_count(), 0.0);
    const double h = m.resolution();
    for (int e = 0; e < m.element_count(); ++e) {
      const int* v = m.element_vertices(e);
      double xl = m.vx[v[0]], xr = m.vx[v[1]];
      // rising hat of v[1]: (x - xl)/h ; falling hat of v[0]: (xr - x)/h
      double rise = detail::hat_power_integral(-xl / h, 1.0 / h, xl, xr, s);
      double fall = detail::hat_power_integral(xr / h, -1.0 / h, xl, xr, s);
      sigma.load[v[1]] += rise;
      sigma.load[v[0]] += fall;
    }
    if (s < 1.0) {
      sigma.mass = 2.0 * std::pow(0.5, 1.0 - s) / (1.0 - s);
    } else {
      sigma.mass = kInf;
      sigma.mass_infinite = true;
    }
  } else {
    sigma.rebuild_load_from_samples();
    if (s < 1.0) {
      for (const Sample& smp : sigma.samples) sigma.mass += smp.w * smp.f;
    } else {
      sigma.mass = kInf;
      sigma.mass_infinite = true;
      for (int v = 0; v < m.vertex_count(); ++v)
        if (m.boundary[v]) sigma.load[v] = kInf;
    }
  }
  return sigma;
}

// Point mass at x0 (1D only; in 2D points are capacity-null).
inline DiscreteMeasure atom_measure(const MeshPtr& mesh, double x0, double m) {
  if (mesh->dim != 1) throw Error("atoms charge capacity-null sets");
  if (!(x0 > 0.0 && x0 < 1.0)) throw Error("atom position must be interior");
  if (!(m > 0.0)) throw Error("atom mass must be positive");
  DiscreteMeasure sigma;
  sigma.mesh = mesh;
  sigma.atoms.push_back({x0, m});
  sigma.rebuild_load_from_samples();
  sigma.mass = m;
  return sigma;
}

namespace detail {

inline void require_compatible(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.mesh != b.mesh) throw Error("incompatible measures");
  if (!a.samples.empty() && !b.samples.empty()) {
    if (a.descriptor != b.descriptor || a.samples.size() != b.samples.size())
      throw Error("incompatible measures");
  }
}

// merge atom lists with op applied to (mass_a, mass_b) at shared positions
inline std::vector<Atom> combine_atoms(const std::vector<Atom>& a, const std::vector<Atom>& b,
                                       const std::function<double(double, double)>& op) {
  std::vector<Atom> out;
  std::vector<bool> used(b.size(), false);
  for (const Atom& p : a) {
    double mb = 0.0;
    for (size_t k = 0; k < b.size(); ++k) {
      if (!used[k] && b[k].x == p.x) {
        mb = b[k].mass;
        used[k] = true;
        break;
      }
    }
    double mass = op(p.mass, mb);
    if (mass > 0.0) out.push_back({p.x, mass});
  }
  for (size_t k = 0; k < b.size(); ++k) {
    if (!used[k]) {
      double mass = op(0.0, b[k].mass);
      if (mass > 0.0) out.push_back({b[k].x, mass});
    }
  }
  std::sort(out.begin(), out.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });
  return out;
}

inline DiscreteMeasure combine(const DiscreteMeasure& a, const DiscreteMeasure& b,
                               const std::function<double(double, double)>& op) {
  require_compatible(a, b);
  DiscreteMeasure out;
  out.mesh = a.mesh;
  if (!a.samples.empty()) {
    out.samples = a.samples;
    out.descriptor = a.descriptor;
    if (!b.samples.empty()) {
      for (size_t k = 0; k < out.samples.size(); ++k)
        out.samples[k].f = op(out.samples[k].f, b.samples[k].f);
    } else {
      for (Sample& s : out.samples) s.f = op(s.f, 0.0);
    }
  } else if (!b.samples.empty()) {
    out.samples = b.samples;
    out.descriptor = b.descriptor;
    for (Sample& s : out.samples) s.f = op(0.0, s.f);
  }
  out.atoms = combine_atoms(a.atoms, b.atoms, op);
  out.rebuild_load_from_samples();
  for (const Sample& s : out.samples) out.mass += s.w * s.f;
  for (const Atom& p : out.atoms) out.mass += p.mass;
  if ((a.mass_infinite || b.mass_infinite) && !out.is_zero()) {
    // cannot certify finiteness of a combination involving an infinite measure
    out.mass = kInf;
    out.mass_infinite = true;
  }
  return out;
}

}  // namespace detail

inline DiscreteMeasure add(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return detail::combine(a, b, [](double x, double y) { return x + y; });
}

// |sigma - nu| for mutually absolutely continuous representations: pointwise
// |f - g| on the shared samples, |m_a - m_b| per atom position.
inline DiscreteMeasure abs_diff(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  auto diff = detail::combine(a, b, [](double x, double y) { return std::abs(x - y); });
  if ((a.mass_infinite || b.mass_infinite) && diff.is_zero()) {
    diff.mass = 0.0;
    diff.mass_infinite = false;
  }
  return diff;
}

// Restriction 1_F sigma with F = {dist(x, boundary) >= margin}; the sample
// point set is kept so the result stays combinable with its parent.
inline DiscreteMeasure truncate_to_core(const DiscreteMeasure& sigma, double margin) {
  if (!(margin >= 0.0 && margin < 0.5)) throw Error("margin too large");
  if (margin == 0.0) return sigma;
  DiscreteMeasure out;
  out.mesh = sigma.mesh;
  out.descriptor = sigma.descriptor;
  out.samples = sigma.samples;
  for (Sample& s : out.samples)
    if (out.mesh->dist_boundary(s.x, s.y) < margin) s.f = 0.0;
  for (const Atom& p : sigma.atoms)
    if (out.mesh->dist_boundary(p.x) >= margin) out.atoms.push_back(p);
  out.rebuild_load_from_samples();
  for (const Sample& s : out.samples) out.mass += s.w * s.f;
  for (const Atom& p : out.atoms) out.mass += p.mass;
  out.core_margin = margin;
  return out;
}

// || f ||_{L^{2/(1+lambda)}(Omega; w_lambda)} with w_lambda = delta^{2(1-lambda)/(1+lambda)},
// by the graded boundary quadrature; +inf when the panel sums do not decay.
inline double dhr_weighted_norm(const MeshPtr& mesh, const Density& f, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("exponent out of range");
  const Mesh& m = *mesh;
  const double p = 2.0 / (1.0 + lambda);
  const double wexp = 2.0 * (1.0 - lambda) / (1.0 + lambda);
  auto integrand = [&](double x, double y) {
    return std::pow(f(x, y), p) * std::pow(m.dist_boundary(x, y), wexp);
  };
  auto samples = m.dim == 1 ? detail::graded_points_1d(m, 5) : detail::graded_points_2d(m);
  // panel sums keyed by geometric depth: depth d spans dist in [2^-(d+1), 2^-d) * cell
  std::vector<double> by_depth(detail::kGradeDepth + 1, 0.0);
  const double cell = m.resolution();
  double acc = 0.0;
  for (const Sample& s : samples) {
    double v = s.w * integrand(s.x, s.y);
    acc += v;
    double d = m.dist_boundary(s.x, s.y);
    if (d < cell) {
      int depth = std::min(detail::kGradeDepth,
                           std::max(0, static_cast<int>(std::floor(-std::log2(d / cell)))));
      by_depth[depth] += v;
    }
  }
  int last = detail::kGradeDepth - 1;
  if (by_depth[last] > 0.0 && by_depth[last] >= by_depth[last - 1] * (1.0 - 1e-9))
    return kInf;
  return std::pow(acc, 1.0 / p);
}

}  // namespace selab::measures
