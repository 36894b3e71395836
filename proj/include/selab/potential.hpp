#pragma once

#include <cmath>
#include <utility>

#include "selab/measures.hpp"
#include "selab/operators.hpp"

namespace selab::potential {

using grid::FeFunction;
using grid::MeshPtr;
using measures::DiscreteMeasure;

struct EnergyReport {
  double lambda = 0.0;
  double trace_norm = 0.0;
  double cov_energy = 0.0;
  double h_minus1 = 0.0;
  double mass = 0.0;
  double mesh_h = 0.0;
  int solver_iterations = 0;
};

// Weak solution of -div(A grad U) = sigma.
inline FeFunction linear_solution(const MeshPtr& mesh, const operators::CoefficientField& A,
                                  const DiscreteMeasure& sigma, int* iterations = nullptr) {
  if (sigma.mesh != mesh) throw Error("measure lives on a different mesh");
  auto K = operators::assemble_stiffness(mesh, A);
  auto b = operators::restrict_interior(*mesh, sigma.load);
  auto u = operators::solve_spd(K, b, 1e-12, iterations);
  return FeFunction(mesh, operators::prolong(*mesh, u), true);
}

// Discrete Green potential G_Omega sigma (A = I).
inline FeFunction green_potential(const MeshPtr& mesh, const DiscreteMeasure& sigma,
                                  int* iterations = nullptr) {
  return linear_solution(mesh, operators::constant_coefficient(mesh, 1.0), sigma, iterations);
}

// sqrt( b(sigma)^T K_I^{-1} b(sigma) ) = sqrt( int G_Omega sigma d sigma ).
// Equals the trace norm at lambda = 0.
inline double h_minus1_norm(const DiscreteMeasure& sigma, int* iterations = nullptr) {
  const MeshPtr& mesh = sigma.mesh;
  FeFunction U = green_potential(mesh, sigma, iterations);
  double acc = 0.0;
  for (int i : mesh->interior_vertices) acc += sigma.load[i] * U[i];
  return std::sqrt(std::max(acc, 0.0));
}

// Middle term of the two-sided potential estimate:
// ( int (G_Omega sigma)^{(1-lambda)/(1+lambda)} d sigma )^{(1+lambda)/2}.
inline double cov_energy(const DiscreteMeasure& sigma, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("exponent out of range");
  if (lambda == 1.0) return sigma.mass;  // exponent 0: sigma(Omega)
  if (sigma.is_zero()) return 0.0;
  FeFunction U = green_potential(sigma.mesh, sigma);
  double p = (1.0 - lambda) / (1.0 + lambda);
  double integral = sigma.integrate_fe_power(U, p);
  return std::pow(integral, 0.5 * (1.0 + lambda));
}

namespace detail {

// geometric-depth test on near-boundary sample sums; true when the innermost
// panel contributions fail to decay
inline bool infinite_by_depth(const grid::Mesh& mesh, const std::vector<measures::Sample>& samples) {
  std::vector<double> by_depth(measures::detail::kGradeDepth + 1, 0.0);
  const double cell = mesh.resolution();
  for (const auto& s : samples) {
    double d = mesh.dist_boundary(s.x, s.y);
    if (d < cell) {
      int depth = std::min(measures::detail::kGradeDepth,
                           std::max(0, static_cast<int>(std::floor(-std::log2(d / cell)))));
      by_depth[depth] += s.w * s.f;
    }
  }
  int last = measures::detail::kGradeDepth - 1;
  return by_depth[last] > 0.0 && by_depth[last] >= by_depth[last - 1] * (1.0 - 1e-9);
}

}  // namespace detail

// Measure with density/atom masses multiplied by (G_Omega mu)^p.
inline DiscreteMeasure potential_weighted_measure(const DiscreteMeasure& mu, double p) {
  if (p == 0.0) return mu;
  if (p < 0.0 && mu.is_zero()) throw Error("weight singularity");
  FeFunction U = green_potential(mu.mesh, mu);
  DiscreteMeasure out;
  out.mesh = mu.mesh;
  out.descriptor = mu.descriptor;
  out.samples = mu.samples;
  out.core_margin = mu.core_margin;
  for (auto& s : out.samples) {
    if (s.f == 0.0) continue;
    double uv = U.value_in_element(s.elem, s.x, s.y);
    if (uv <= 0.0 && p < 0.0) throw Error("weight singularity");
    s.f *= std::pow(uv, p);
  }
  for (const auto& a : mu.atoms) {
    double uv = U.value_at(a.x);
    if (uv <= 0.0 && p < 0.0) throw Error("weight singularity");
    out.atoms.push_back({a.x, a.mass * std::pow(uv, p)});
  }
  out.rebuild_load_from_samples();
  for (const auto& s : out.samples) out.mass += s.w * s.f;
  for (const auto& a : out.atoms) out.mass += a.mass;
  if (mu.mass_infinite && detail::infinite_by_depth(*out.mesh, out.samples)) {
    out.mass = kInf;
    out.mass_infinite = true;
  }
  return out;
}

}  // namespace selab::potential
