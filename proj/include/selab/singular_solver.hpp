#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "selab/potential.hpp"

namespace selab::singular {

using grid::FeFunction;
using grid::MeshPtr;
using measures::DiscreteMeasure;
using operators::CoefficientField;
using operators::SparseSpdOperator;

struct SolverOptions {
  double epsilon0 = 1.0;      // initial regularization
  double decay = 0.25;        // geometric decay per stage
  double epsilon_min = 1e-12; // terminal regularization
  double newton_tol = 1e-11;  // residual inf-norm
  int max_newton = 50;        // per stage
  double positivity_floor = 1e-300;  // diagnostic only
  bool keep_stage_solutions = false;

  void validate() const {
    if (!(decay > 0.0 && decay < 1.0)) throw Error("decay must lie in (0,1)");
    if (!(epsilon_min < epsilon0)) throw Error("epsilon_min must be below epsilon0");
  }
};

struct StageStats {
  double epsilon = 0.0;
  int newton_steps = 0;
  double residual = 0.0;
};

struct BoundReport {
  double trinorm_lower = 0.0;  // certified bracket of the energy norm
  double trinorm_upper = 0.0;
  double h1 = 0.0;
  double energy_lower = 0.0;  // beta^{-1/(1+lambda)} bracket on |grad u|
  double energy_upper = 0.0;
  bool energy_pass = false;
  bool pointwise_checked = false;
  bool pointwise_pass = true;
  double pointwise_max_ratio = 0.0;
};

struct SolveReport {
  bool converged = false;
  std::vector<StageStats> stages;
  double h1_seminorm = 0.0;
  bool has_energy = false;
  double energy_J = 0.0;
  double min_interior = 0.0;
  double effective_tol = 0.0;
  int total_cg_iterations = 0;
  std::vector<std::vector<double>> stage_solutions;  // full vertex vectors, optional
  BoundReport bounds;
  bool has_bounds = false;
};

namespace detail {

// N_eps(u)_i = int phi_i (u + eps)^{-lambda} d sigma on interior dofs.
// Returns false if u + eps is nonpositive at a charged evaluation point.
inline bool assemble_singular_load(const grid::Mesh& mesh, const DiscreteMeasure& sigma,
                                   const std::vector<double>& u_full, double lambda, double eps,
                                   std::vector<double>& out) {
  out.assign(mesh.interior_count(), 0.0);
  double hats[3];
  for (const auto& s : sigma.samples) {
    if (s.f == 0.0) continue;
    mesh.hat_values(s.elem, s.x, s.y, hats);
    const int* v = mesh.element_vertices(s.elem);
    double uv = 0.0;
    for (int k = 0; k <= mesh.dim; ++k) uv += hats[k] * u_full[v[k]];
    double t = uv + eps;
    if (!(t > 0.0)) return false;
    double val = s.w * s.f * std::pow(t, -lambda);
    for (int k = 0; k <= mesh.dim; ++k) {
      int ik = mesh.interior_index[v[k]];
      if (ik >= 0) out[ik] += val * hats[k];
    }
  }
  for (const auto& a : sigma.atoms) {
    int e = mesh.locate(a.x);
    mesh.hat_values(e, a.x, 0.0, hats);
    const int* v = mesh.element_vertices(e);
    double uv = 0.0;
    for (int k = 0; k <= mesh.dim; ++k) uv += hats[k] * u_full[v[k]];
    double t = uv + eps;
    if (!(t > 0.0)) return false;
    double val = a.mass * std::pow(t, -lambda);
    for (int k = 0; k <= mesh.dim; ++k) {
      int ik = mesh.interior_index[v[k]];
      if (ik >= 0) out[ik] += val * hats[k];
    }
  }
  return true;
}

// Jacobian K + lambda int phi_i phi_j (u + eps)^{-lambda-1} d sigma;
// the added weighted mass keeps the system SPD.
inline SparseSpdOperator assemble_jacobian(const grid::Mesh& mesh, const SparseSpdOperator& K,
                                           const DiscreteMeasure& sigma,
                                           const std::vector<double>& u_full, double lambda,
                                           double eps) {
  SparseSpdOperator J = K;
  double hats[3];
  auto scatter = [&](int elem, double x, double y, double weight) {
    mesh.hat_values(elem, x, y, hats);
    const int* v = mesh.element_vertices(elem);
    double uv = 0.0;
    for (int k = 0; k <= mesh.dim; ++k) uv += hats[k] * u_full[v[k]];
    double c = lambda * weight * std::pow(uv + eps, -lambda - 1.0);
    for (int a = 0; a <= mesh.dim; ++a) {
      int ia = mesh.interior_index[v[a]];
      if (ia < 0) continue;
      for (int b = 0; b <= mesh.dim; ++b) {
        int ib = mesh.interior_index[v[b]];
        if (ib < 0) continue;
        J.at(ia, ib) += c * hats[a] * hats[b];
      }
    }
  };
  for (const auto& s : sigma.samples)
    if (s.f != 0.0) scatter(s.elem, s.x, s.y, s.w * s.f);
  for (const auto& a : sigma.atoms) scatter(mesh.locate(a.x), a.x, 0.0, a.mass);
  return J;
}

inline double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

// Solve -div(A grad u) = sigma / u^lambda by regularization continuation
// (u + eps_k)^{-lambda}, eps_k = eps0 * decay^k, with damped Newton stages.
inline std::pair<FeFunction, SolveReport> solve_singular(const MeshPtr& mesh,
                                                         const CoefficientField& A,
                                                         const DiscreteMeasure& sigma,
                                                         double lambda,
                                                         const SolverOptions& opts = {}) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("out of scope regime");
  if (sigma.mesh != mesh) throw Error("measure lives on a different mesh");
  opts.validate();
  if (sigma.is_zero()) throw Error("existence requires sigma != 0");
  const grid::Mesh& m = *mesh;
  for (int i : m.interior_vertices)
    if (!(sigma.load[i] >= 0.0)) throw Error("measure load must be nonnegative");

  SparseSpdOperator K = operators::assemble_stiffness(mesh, A);
  std::vector<double> b = operators::restrict_interior(m, sigma.load);

  SolveReport report;
  if (lambda == 0.0) {
    int iters = 0;
    auto u_int = operators::solve_spd(K, b, 1e-12, &iters);
    report.converged = true;
    report.total_cg_iterations = iters;
    report.stages.push_back({0.0, 0, 0.0});
    FeFunction u(mesh, operators::prolong(m, u_int), true);
    report.h1_seminorm = grid::h1_seminorm(u);
    report.min_interior = kInf;
    for (int i : m.interior_vertices) report.min_interior = std::min(report.min_interior, u[i]);
    report.effective_tol = opts.newton_tol;
    return {std::move(u), std::move(report)};
  }

  // initial guess: linear solution clipped below at eps0
  int iters = 0;
  std::vector<double> u_int = operators::solve_spd(K, b, 1e-12, &iters);
  report.total_cg_iterations += iters;
  std::vector<double> u_full = operators::prolong(m, u_int);
  for (int i : m.interior_vertices) u_full[i] = std::max(u_full[i], opts.epsilon0);

  std::vector<double> load, r(m.interior_count()), Ku(m.interior_count());
  auto residual = [&](const std::vector<double>& full, double eps, std::vector<double>& out,
                      bool& ok) -> double {
    ok = detail::assemble_singular_load(m, sigma, full, lambda, eps, load);
    if (!ok) return kInf;
    auto interior = operators::restrict_interior(m, full);
    K.apply(interior.data(), Ku.data());
    out.resize(m.interior_count());
    for (int i = 0; i < m.interior_count(); ++i) out[i] = Ku[i] - load[i];
    return detail::inf_norm(out);
  };

  // roundoff floor: residual entries cannot be resolved below the assembly
  // scale or the cancellation scale |K| |u| of the matvec
  bool ok = false;
  residual(u_full, opts.epsilon0, r, ok);
  double kdiag = 0.0;
  for (int i = 0; i < K.n; ++i) kdiag = std::max(kdiag, K.diagonal(i));
  double scale = std::max(detail::inf_norm(Ku), detail::inf_norm(load));
  double cancel = 2.0 * kdiag * detail::inf_norm(u_full);
  const double tol =
      std::max({opts.newton_tol, 1e-14 * scale, 4.4e-16 * cancel});
  report.effective_tol = tol;

  std::vector<double> prev_stage = u_full;
  double eps = opts.epsilon0;
  bool last_stage = false;
  while (true) {
    StageStats stats;
    stats.epsilon = eps;
    double rnorm = residual(u_full, eps, r, ok);
    if (!ok) throw Error("stage failure");
    int step = 0;
    for (; rnorm > tol; ++step) {
      if (step >= opts.max_newton) throw Error("stage failure");
      SparseSpdOperator J = detail::assemble_jacobian(m, K, sigma, u_full, lambda, eps);
      int cg_iters = 0;
      std::vector<double> d = operators::solve_spd(J, r, 1e-12, &cg_iters);
      report.total_cg_iterations += cg_iters;
      double t = 1.0;
      std::vector<double> trial(u_full), r_new;
      double rnorm_new = kInf;
      int halvings = 0;
      for (; halvings < 30; ++halvings) {
        for (int i = 0; i < m.interior_count(); ++i)
          trial[m.interior_vertices[i]] = u_full[m.interior_vertices[i]] - t * d[i];
        bool ok2 = false;
        rnorm_new = residual(trial, eps, r_new, ok2);
        if (ok2 && rnorm_new < rnorm) break;
        t *= 0.5;
      }
      if (halvings == 30) throw Error("stage failure");
      u_full.swap(trial);
      r.swap(r_new);
      rnorm = rnorm_new;
    }
    stats.newton_steps = step;
    stats.residual = rnorm;
    report.stages.push_back(stats);
    if (opts.keep_stage_solutions) report.stage_solutions.push_back(u_full);

    if (last_stage) break;
    // continuation termination: successive stages agree to tolerance
    if (report.stages.size() > 1) {
      double diff = 0.0;
      for (int v = 0; v < m.vertex_count(); ++v)
        diff = std::max(diff, std::abs(u_full[v] - prev_stage[v]));
      if (diff < tol) break;
    }
    prev_stage = u_full;
    eps *= opts.decay;
    if (eps <= opts.epsilon_min) {
      eps = opts.epsilon_min;
      last_stage = true;
    }
  }

  report.converged = true;
  report.min_interior = kInf;
  for (int i : m.interior_vertices) report.min_interior = std::min(report.min_interior, u_full[i]);
  if (!(report.min_interior > 0.0)) throw Error("solution lost positivity");
  FeFunction u(mesh, std::move(u_full), true);
  report.h1_seminorm = grid::h1_seminorm(u);
  return {std::move(u), std::move(report)};
}

// J(u) = 1/2 int A grad u . grad u - (1-lambda)^{-1} int u_+^{1-lambda} d sigma,
// defined for 0 <= lambda < 1 and symmetric A.
inline double energy_J(const FeFunction& u, const CoefficientField& A,
                       const DiscreteMeasure& sigma, double lambda) {
  if (lambda == 1.0) throw Error("functional undefined at lambda=1");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw Error("exponent out of range");
  if (!A.is_symmetric()) throw Error("variational form requires symmetry");
  if (sigma.mesh != u.mesh()) throw Error("measure lives on a different mesh");
  const grid::Mesh& m = *u.mesh();
  SparseSpdOperator K = operators::assemble_stiffness(u.mesh(), A);
  auto u_int = operators::restrict_interior(m, u.values());
  double quad = 0.5 * K.quadratic_form(u_int);
  double p = 1.0 - lambda;
  double pairing = 0.0;
  for (const auto& s : sigma.samples) {
    if (s.f == 0.0) continue;
    double uv = u.value_in_element(s.elem, s.x, s.y);
    pairing += s.w * s.f * std::pow(std::max(uv, 0.0), p);
  }
  for (const auto& a : sigma.atoms)
    pairing += a.mass * std::pow(std::max(u.value_at(a.x), 0.0), p);
  return quad - pairing / p;
}

// Check the energy bracket and (for core-supported sigma) the pointwise bound
// u <= (1+lambda)^{1/(1+lambda)} U^{1/(1+lambda)}.
inline BoundReport verify_bounds(const FeFunction& u, const CoefficientField& A,
                                 const DiscreteMeasure& sigma, double lambda, double alpha,
                                 double beta, double slack = 0.02) {
  BoundReport rep;
  double cov = potential::cov_energy(sigma, lambda);
  double bracket = std::pow(1.0 - lambda * lambda, 0.5 * (1.0 - lambda));
  rep.trinorm_lower = cov * bracket;
  rep.trinorm_upper = cov;
  double e = 1.0 / (1.0 + lambda);
  rep.energy_lower = std::pow(beta, -e) * std::pow(rep.trinorm_lower, e);
  rep.energy_upper = std::pow(alpha, -e) * std::pow(rep.trinorm_upper, e);
  rep.h1 = grid::h1_seminorm(u);
  rep.energy_pass =
      rep.h1 >= rep.energy_lower * (1.0 - slack) && rep.h1 <= rep.energy_upper * (1.0 + slack);
  if (sigma.core_margin > 0.0) {
    rep.pointwise_checked = true;
    FeFunction U = potential::linear_solution(u.mesh(), A, sigma);
    double c = std::pow(1.0 + lambda, e);
    for (int v = 0; v < u.mesh()->vertex_count(); ++v) {
      double bound = c * std::pow(std::max(U[v], 0.0), e);
      if (bound > 0.0) rep.pointwise_max_ratio = std::max(rep.pointwise_max_ratio, u[v] / bound);
      else if (u[v] > 0.0) rep.pointwise_max_ratio = kInf;
    }
    rep.pointwise_pass = rep.pointwise_max_ratio <= 1.0 + slack / 2;
  }
  return rep;
}

}  // namespace selab::singular
