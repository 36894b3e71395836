#pragma once

#include "selab/singular_solver.hpp"

namespace selab::potential {

// The energy norm of a measure, computed through the alpha = beta = 1 energy
// identity: solve -div(grad u) = sigma / u^lambda and return |grad u|^{1+lambda}.
// At lambda = 0 this is the linear solve, i.e. the H^{-1} norm.
inline double trace_norm(const DiscreteMeasure& sigma, double lambda,
                         int* solver_iterations = nullptr) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("exponent out of range");
  if (sigma.is_zero()) return 0.0;  // norm of the zero measure, by continuity
  if (lambda == 0.0) return h_minus1_norm(sigma, solver_iterations);
  auto A = operators::constant_coefficient(sigma.mesh, 1.0);
  auto [u, report] = singular::solve_singular(sigma.mesh, A, sigma, lambda);
  if (solver_iterations) *solver_iterations = report.total_cg_iterations;
  return std::pow(report.h1_seminorm, 1.0 + lambda);
}

// d_lambda(sigma, nu) = energy norm of |sigma - nu|.
inline double d_lambda(const DiscreteMeasure& sigma, const DiscreteMeasure& nu, double lambda) {
  auto diff = measures::abs_diff(sigma, nu);
  return trace_norm(diff, lambda);
}

inline EnergyReport energy_report(const DiscreteMeasure& sigma, double lambda) {
  EnergyReport rep;
  rep.lambda = lambda;
  rep.mass = sigma.mass;
  rep.mesh_h = sigma.mesh->h;
  rep.h_minus1 = h_minus1_norm(sigma);
  rep.cov_energy = cov_energy(sigma, lambda);
  rep.trace_norm = trace_norm(sigma, lambda, &rep.solver_iterations);
  return rep;
}

}  // namespace selab::potential
