#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "selab/energy.hpp"

namespace selab::homogenization {

using grid::FeFunction;
using grid::MeshPtr;
using measures::DiscreteMeasure;
using operators::CoefficientField;

using Profile = std::function<double(double)>;  // periodic on [0,1], positive

struct OscillatingFamily {
  Profile profile;
  int axis = 0;  // 0: layered along x, 1: along y (2D only)
  std::vector<double> epsilons;

  void validate() const {
    for (double e : epsilons) {
      if (!(e > 0.0)) throw Error("epsilon must be positive");
      double inv = 1.0 / e;
      if (std::abs(inv - std::round(inv)) > 1e-9 * inv)
        throw Error("epsilon must be the reciprocal of an integer");
    }
  }
};

namespace detail {

inline std::pair<double, double> profile_range(const Profile& a) {
  const int n = 200000;
  double lo = kInf, hi = -kInf;
  for (int k = 0; k <= n; ++k) {
    double v = a(static_cast<double>(k) / n);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo > 0.0)) throw Error("profile must be positive");
  return {lo, hi};
}

inline double mean_of(const std::function<double(double)>& g) {
  // composite Gauss over [0,1]
  const auto rule = quadrature::gauss_legendre(12);
  const int panels = 64;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = static_cast<double>(p) / panels, w = 1.0 / panels;
    for (size_t q = 0; q < rule.points.size(); ++q)
      acc += w * rule.weights[q] * g(a + w * rule.points[q]);
  }
  return acc;
}

}  // namespace detail

// A(x) = a(x_axis / eps) I sampled at element midpoints; ellipticity bounds
// from the profile range.
inline CoefficientField layered_coefficient(const Profile& profile, double eps, int axis,
                                            const MeshPtr& mesh) {
  if (!(eps > 0.0)) throw Error("epsilon must be positive");
  if (mesh->resolution() > eps / 16.0 * (1.0 + 1e-12)) throw Error("mesh must resolve epsilon");
  if (axis != 0 && axis != 1) throw Error("axis must be 0 or 1");
  if (axis == 1 && mesh->dim == 1) throw Error("axis must be 0 in 1D");
  auto field = operators::scalar_coefficient(mesh, [&](double x, double y) {
    double c = (axis == 0 ? x : y) / eps;
    return profile(c - std::floor(c));
  });
  auto [lo, hi] = detail::profile_range(profile);
  field.alpha = lo;
  field.beta = hi;
  return field;
}

// Classical laminate limit: harmonic mean across the layers, arithmetic mean
// along them. Returns the diagonal of A0 (one entry in 1D).
inline std::array<double, 2> h_limit_layered(const Profile& profile, int axis, int dim) {
  double harm = 1.0 / detail::mean_of([&](double y) { return 1.0 / profile(y); });
  if (dim == 1) return {harm, 0.0};
  double arith = detail::mean_of(profile);
  if (axis == 0) return {harm, arith};
  return {arith, harm};
}

inline CoefficientField homogenized_field(const MeshPtr& mesh, const std::array<double, 2>& a0) {
  if (mesh->dim == 1) return operators::constant_coefficient(mesh, a0[0]);
  return operators::matrix_coefficient(mesh, {a0[0], 0.0, 0.0, a0[1]});
}

enum class FamilyKind { none, decaying, oscillating };

inline FamilyKind family_kind_from_string(const std::string& s) {
  if (s == "none") return FamilyKind::none;
  if (s == "decaying") return FamilyKind::decaying;
  if (s == "oscillating") return FamilyKind::oscillating;
  throw Error("unknown measure family kind: " + s);
}

struct PerturbedMeasure {
  double eps = 0.0;  // 0 denotes the limit entry (sigma itself)
  DiscreteMeasure sigma;
  bool dlambda_nonvanishing = false;
};

// Density families sigma_eps = f_eps dx on the sample set of the base measure:
//   decaying:    f_eps = f (1 + eps sin(2 pi x / eps)),  d_lambda -> 0
//   oscillating: f_eps = f (1 + sin(2 pi x / eps)),      weak-* only; the
//                total variation of sigma_eps - sigma does not vanish.
inline std::vector<PerturbedMeasure> perturbed_measure_family(const DiscreteMeasure& base,
                                                              FamilyKind kind,
                                                              const std::vector<double>& epsilons) {
  if (base.samples.empty() || !base.atoms.empty())
    throw Error("measure family requires a density measure");
  std::vector<PerturbedMeasure> family;
  for (double eps : epsilons) {
    PerturbedMeasure entry;
    entry.eps = eps;
    if (eps == 0.0 || kind == FamilyKind::none) {
      entry.sigma = base;
      family.push_back(std::move(entry));
      continue;
    }
    if (base.mesh->resolution() > eps / 16.0 * (1.0 + 1e-12))
      throw Error("mesh must resolve epsilon");
    DiscreteMeasure pert = base;
    for (auto& s : pert.samples) {
      double osc = std::sin(2.0 * M_PI * s.x / eps);
      double factor = kind == FamilyKind::decaying ? 1.0 + eps * osc : 1.0 + osc;
      s.f *= std::max(factor, 0.0);
    }
    pert.rebuild_load_from_samples();
    pert.mass = 0.0;
    for (const auto& s : pert.samples) pert.mass += s.w * s.f;
    entry.sigma = std::move(pert);
    entry.dlambda_nonvanishing = (kind == FamilyKind::oscillating);
    family.push_back(std::move(entry));
  }
  return family;
}

struct ConvergenceRow {
  double eps = 0.0;
  double l2_err = 0.0;
  std::vector<double> pairs;  // (u_eps - u0, phi_j)_{H^1_0}
  double hminus1_rhs = 0.0;   // discrete H^{-1} norm of the RHS difference
  double d_lambda = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // sorted by decreasing eps
  double lambda = 0.0;
  double mesh_h = 0.0;
  std::array<double, 2> a0{0.0, 0.0};
  bool dlambda_nonvanishing = false;
};

inline std::vector<FeFunction> default_test_functions(const MeshPtr& mesh, int count = 4) {
  std::vector<FeFunction> phi;
  for (int j = 1; j <= count; ++j) {
    phi.push_back(grid::p1_interpolate(
        mesh,
        [&, j](double x, double y) {
          double v = std::sin(j * M_PI * x);
          if (mesh->dim == 2) v *= std::sin(j * M_PI * y);
          return v;
        },
        true));
  }
  return phi;
}

// Solve the eps-problems and the homogenized limit problem on one mesh and
// collect the convergence indicators of the perturbed problems.
inline ConvergenceTable run_h_convergence(const OscillatingFamily& family, FamilyKind sigma_kind,
                                          const DiscreteMeasure& sigma_base, double lambda,
                                          const std::vector<FeFunction>& test_functions,
                                          const MeshPtr& mesh,
                                          const singular::SolverOptions& opts = {}) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw Error("out of scope regime");
  if (sigma_base.is_zero()) throw Error("existence requires sigma != 0");
  family.validate();

  std::vector<double> eps_sorted = family.epsilons;
  std::sort(eps_sorted.rbegin(), eps_sorted.rend());

  ConvergenceTable table;
  table.lambda = lambda;
  table.mesh_h = mesh->h;
  table.a0 = h_limit_layered(family.profile, family.axis, mesh->dim);

  auto A0 = homogenized_field(mesh, table.a0);
  auto [u0, rep0] = singular::solve_singular(mesh, A0, sigma_base, lambda, opts);

  auto K_I = operators::assemble_stiffness(mesh, operators::constant_coefficient(mesh, 1.0));
  std::vector<double> load0;
  singular::detail::assemble_singular_load(*mesh, sigma_base, u0.values(), lambda, 0.0, load0);

  auto sigma_family = perturbed_measure_family(sigma_base, sigma_kind, eps_sorted);

  for (size_t k = 0; k < eps_sorted.size(); ++k) {
    double eps = eps_sorted[k];
    const DiscreteMeasure& sigma_eps = sigma_family[k].sigma;
    table.dlambda_nonvanishing |= sigma_family[k].dlambda_nonvanishing;
    auto A_eps = layered_coefficient(family.profile, eps, family.axis, mesh);
    auto [u_eps, rep] = singular::solve_singular(mesh, A_eps, sigma_eps, lambda, opts);

    ConvergenceRow row;
    row.eps = eps;
    row.l2_err = grid::l2_distance(u_eps, u0);

    std::vector<double> diff(mesh->interior_count());
    for (int i = 0; i < mesh->interior_count(); ++i)
      diff[i] = u_eps[mesh->interior_vertices[i]] - u0[mesh->interior_vertices[i]];
    auto K_diff = K_I.apply(diff);
    for (const auto& phi : test_functions) {
      double s = 0.0;
      for (int i = 0; i < mesh->interior_count(); ++i)
        s += K_diff[i] * phi[mesh->interior_vertices[i]];
      row.pairs.push_back(s);
    }

    std::vector<double> load_eps;
    singular::detail::assemble_singular_load(*mesh, sigma_eps, u_eps.values(), lambda, 0.0,
                                             load_eps);
    std::vector<double> r(mesh->interior_count());
    for (int i = 0; i < mesh->interior_count(); ++i) r[i] = load_eps[i] - load0[i];
    auto Kinv_r = operators::solve_spd(K_I, r);
    double rr = 0.0;
    for (int i = 0; i < mesh->interior_count(); ++i) rr += r[i] * Kinv_r[i];
    row.hminus1_rhs = std::sqrt(std::max(rr, 0.0));

    row.d_lambda =
        sigma_kind == FamilyKind::none ? 0.0 : potential::d_lambda(sigma_base, sigma_eps, lambda);

    for (double v : row.pairs)
      if (!std::isfinite(v)) throw Error("convergence table entry not finite");
    if (!std::isfinite(row.l2_err) || !std::isfinite(row.hminus1_rhs) ||
        !std::isfinite(row.d_lambda))
      throw Error("convergence table entry not finite");
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Least-squares fit of the constant-coefficient solution through the linear
// (lambda = 0) problem with sigma = dx; identifies the effective coefficient.
inline double fit_effective_constant(const MeshPtr& mesh, const CoefficientField& A_eps) {
  if (mesh->dim != 1) throw Error("effective-coefficient fit is one-dimensional");
  auto sigma = measures::density_measure(mesh, [](double, double) { return 1.0; });
  FeFunction u = potential::linear_solution(mesh, A_eps, sigma);
  FeFunction psi = grid::p1_interpolate(
      mesh, [](double x, double) { return 0.5 * x * (1.0 - x); }, true);
  return grid::l2_inner(psi, psi) / grid::l2_inner(u, psi);
}

// fitted decay rate: least-squares slope of log(value) against log(eps)
inline double fitted_rate(const std::vector<double>& eps, const std::vector<double>& values) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t k = 0; k < eps.size(); ++k) {
    if (!(values[k] > 0.0)) continue;
    double x = std::log(eps[k]), y = std::log(values[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace selab::homogenization
