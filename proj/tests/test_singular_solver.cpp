#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "selab/energy.hpp"

using namespace selab;
using namespace selab::grid;
using namespace selab::measures;
using namespace selab::singular;

namespace {

DiscreteMeasure lebesgue(const MeshPtr& mesh) {
  return density_measure(mesh, [](double, double) { return 1.0; });
}

double linf_nodal_error(const FeFunction& u, const std::function<double(double, double)>& exact) {
  double err = 0.0;
  const auto& mesh = *u.mesh();
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    double y = mesh.dim == 2 ? mesh.vy[v] : 0.0;
    err = std::max(err, std::abs(u[v] - exact(mesh.vx[v], y)));
  }
  return err;
}

double l2_error(const FeFunction& u, const std::function<double(double, double)>& exact) {
  // element Gauss-5 quadrature of (u_h - u)^2
  const auto& mesh = *u.mesh();
  auto rule = quadrature::gauss_legendre(3);
  double acc = 0.0;
  if (mesh.dim == 1) {
    const double w = mesh.resolution();
    for (int e = 0; e < mesh.element_count(); ++e) {
      double xl = mesh.vx[mesh.element_vertices(e)[0]];
      for (size_t q = 0; q < rule.points.size(); ++q) {
        double x = xl + w * rule.points[q];
        double d = u.value_in_element(e, x) - exact(x, 0.0);
        acc += w * rule.weights[q] * d * d;
      }
    }
  } else {
    for (int e = 0; e < mesh.element_count(); ++e) {
      for (const auto& tp : quadrature::triangle_rule_deg5()) {
        const int* v = mesh.element_vertices(e);
        double x = tp.b0 * mesh.vx[v[0]] + tp.b1 * mesh.vx[v[1]] + tp.b2 * mesh.vx[v[2]];
        double y = tp.b0 * mesh.vy[v[0]] + tp.b1 * mesh.vy[v[1]] + tp.b2 * mesh.vy[v[2]];
        double d = u.value_in_element(e, x, y) - exact(x, y);
        acc += mesh.element_measure(e) * tp.weight * d * d;
      }
    }
  }
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("manufactured solution, lambda = 1") {
  // u = sin(pi x), sigma = pi^2 sin^2(pi x) dx
  auto exact = [](double x, double) { return std::sin(M_PI * x); };
  double prev = 0.0;
  for (int k = 0; k < 3; ++k) {
    auto mesh = build_interval_mesh(32 << k);
    auto A = operators::constant_coefficient(mesh, 1.0);
    auto sigma = density_measure(mesh, [](double x, double) {
      double s = std::sin(M_PI * x);
      return M_PI * M_PI * s * s;
    });
    auto [u, report] = solve_singular(mesh, A, sigma, 1.0);
    CHECK(report.converged);
    double err = l2_error(u, exact);
    if (k > 0) CHECK(prev / err > 3.5);
    prev = err;
  }
}

TEST_CASE("manufactured solution, lambda = 1/2") {
  // u = x(1-x), sigma = 2 sqrt(x(1-x)) dx
  auto exact = [](double x, double) { return x * (1.0 - x); };
  auto mesh = build_interval_mesh(256);
  auto A = operators::constant_coefficient(mesh, 1.0);
  auto sigma =
      density_measure(mesh, [](double x, double) { return 2.0 * std::sqrt(x * (1.0 - x)); });
  auto [u, report] = solve_singular(mesh, A, sigma, 0.5);
  CHECK(l2_error(u, exact) < 2e-5);
  CHECK(energy_J(u, A, sigma, 0.5) == Catch::Approx(-0.5).margin(2e-5));
}

TEST_CASE("lambda = 0 equals the linear solution") {
  auto mesh = build_interval_mesh(64);
  auto A = operators::constant_coefficient(mesh, 1.0);
  auto sigma = lebesgue(mesh);
  auto [u, report] = solve_singular(mesh, A, sigma, 0.0);
  auto U = potential::linear_solution(mesh, A, sigma);
  CHECK(linf_nodal_error(u, [&](double x, double) { return U.value_at(x); }) < 1e-14);
  CHECK(report.stages.size() == 1);
}

TEST_CASE("solver input validation") {
  auto mesh = build_interval_mesh(16);
  auto A = operators::constant_coefficient(mesh, 1.0);
  auto sigma = lebesgue(mesh);
  auto zero = abs_diff(sigma, sigma);
  CHECK_THROWS_WITH(solve_singular(mesh, A, zero, 0.5), "existence requires sigma != 0");
  CHECK_THROWS_WITH(solve_singular(mesh, A, sigma, 1.5), "out of scope regime");
}

TEST_CASE("exact discrete scaling law") {
  auto mesh = build_interval_mesh(256);
  auto A = operators::constant_coefficient(mesh, 1.0);
  auto f = [](double x, double) { return 1.0 + 0.3 * std::sin(5 * x); };
  double lambda = 0.6;
  auto [u, rep] = solve_singular(mesh, A, density_measure(mesh, f), lambda);
  for (double t : {0.1, 3.0, 10.0}) {
    auto [ut, rept] =
        solve_singular(mesh, A, density_measure(mesh, [&](double x, double y) { return t * f(x, y); }), lambda);
    double scale = std::pow(t, 1.0 / (1.0 + lambda));
    double err = 0.0;
    for (int v = 0; v < mesh->vertex_count(); ++v)
      err = std::max(err, std::abs(ut[v] - scale * u[v]));
    CHECK(err <= 1e-8);
  }
}

TEST_CASE("discrete comparison principle in 1D") {
  auto mesh = build_interval_mesh(128);
  auto A = operators::constant_coefficient(mesh, 1.0);
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    double c1 = rng.uniform(0.2, 1.0), c2 = rng.uniform(0.0, 1.0);
    double k1 = 2.0 + std::floor(rng.uniform(0.0, 4.0));
    auto f = [&](double x, double) { return c1 * (1.0 + 0.5 * std::sin(k1 * x)); };
    auto g = [&](double x, double y) { return f(x, y) + c2 * (1.0 + std::cos(2 * x)); };
    double lambda = rng.uniform(0.1, 1.0);
    auto [u, ru] = solve_singular(mesh, A, density_measure(mesh, f), lambda);
    auto [v, rv] = solve_singular(mesh, A, density_measure(mesh, g), lambda);
    for (int i = 0; i < mesh->vertex_count(); ++i) CHECK(u[i] <= v[i] + 1e-9);
  }
}

TEST_CASE("comparison principle on the 2D structured mesh") {
  auto mesh = build_square_mesh(12);
  auto A = operators::scalar_coefficient(
      mesh, [](double x, double y) { return 1.0 + 0.5 * x + 0.25 * y; });
  auto f = [](double x, double y) { return 1.0 + 0.3 * std::sin(3 * x) * std::cos(2 * y); };
  auto g = [&](double x, double y) { return f(x, y) + 0.5; };
  auto [u, ru] = solve_singular(mesh, A, density_measure(mesh, f), 0.5);
  auto [v, rv] = solve_singular(mesh, A, density_measure(mesh, g), 0.5);
  for (int i = 0; i < mesh->vertex_count(); ++i) CHECK(u[i] <= v[i] + 1e-9);
}

TEST_CASE("stage solutions increase monotonically in the continuation") {
  auto mesh = build_interval_mesh(64);
  auto A = operators::constant_coefficient(mesh, 1.0);
  SolverOptions opts;
  opts.keep_stage_solutions = true;
  auto [u, report] = solve_singular(mesh, A, lebesgue(mesh), 0.7, opts);
  REQUIRE(report.stage_solutions.size() >= 2);
  for (size_t k = 1; k < report.stage_solutions.size(); ++k) {
    for (int v = 0; v < mesh->vertex_count(); ++v)
      CHECK(report.stage_solutions[k][v] >= report.stage_solutions[k - 1][v] - 1e-9);
  }
}

TEST_CASE("two continuation schedules agree") {
  auto mesh = build_interval_mesh(128);
  auto A = operators::constant_coefficient(mesh, 1.0);
  auto sigma = density_measure(mesh, [](double x, double) { return 1.0 + x; });
  SolverOptions fast, slow;
  fast.decay = 0.25;
  slow.decay = 0.5;
  auto [u1, r1] = solve_singular(mesh, A, sigma, 0.5, fast);
  auto [u2, r2] = solve_singular(mesh, A, sigma, 0.5, slow);
  double err = 0.0;
  for (int v = 0; v < mesh->vertex_count(); ++v) err = std::max(err, std::abs(u1[v] - u2[v]));
  CHECK(err <= 1e-9);
}

TEST_CASE("energy functional") {
  auto mesh = build_interval_mesh(128);
  auto A = operators::constant_coefficient(mesh, 1.0);
  auto sigma = lebesgue(mesh);

  CHECK(energy_J(FeFunction::zero(mesh), A, sigma, 0.5) == 0.0);
  CHECK_THROWS_WITH(energy_J(FeFunction::zero(mesh), A, sigma, 1.0),
                    "functional undefined at lambda=1");

  auto sq = build_square_mesh(4);
  auto skew = operators::matrix_coefficient(sq, {1, 0.5, -0.5, 1});
  auto sigma2 = density_measure(sq, [](double, double) { return 1.0; });
  CHECK_THROWS_WITH(energy_J(FeFunction::zero(sq), skew, sigma2, 0.5),
                    "variational form requires symmetry");

  // with sigma = 0 only the quadratic part remains: J(t u) = t^2 J(u)
  auto zero = abs_diff(sigma, sigma);
  auto bump = p1_interpolate(
      mesh, [](double x, double) { return std::max(0.0, 0.25 - std::abs(x - 0.5)); }, true);
  double j1 = energy_J(bump, A, zero, 0.5);
  std::vector<double> scaled(bump.values());
  for (double& v : scaled) v *= 2.0;
  double j2 = energy_J(FeFunction(mesh, scaled, true), A, zero, 0.5);
  CHECK(j2 == Catch::Approx(4.0 * j1).epsilon(1e-12));
  CHECK(j1 > 0.0);
}

TEST_CASE("solution minimizes J locally") {
  auto mesh = build_interval_mesh(64);
  auto A = operators::constant_coefficient(mesh, 1.0);
  auto sigma = density_measure(mesh, [](double x, double) { return 1.0 + 0.5 * x; });
  double lambda = 0.5;
  auto [u, rep] = solve_singular(mesh, A, sigma, lambda);
  double J0 = energy_J(u, A, sigma, lambda);
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> dir(mesh->vertex_count(), 0.0);
    for (int i : mesh->interior_vertices) dir[i] = rng.uniform(-1.0, 1.0);
    for (double t : {1e-3, -1e-3}) {
      std::vector<double> vals(u.values());
      for (int v = 0; v < mesh->vertex_count(); ++v) vals[v] = std::max(vals[v] + t * dir[v], 0.0);
      double J = energy_J(FeFunction(mesh, vals, true), A, sigma, lambda);
      CHECK(J0 <= J + 1e-10);
    }
  }
}

TEST_CASE("bound report") {
  auto mesh = build_interval_mesh(256);
  double lambda = 0.5;

  // alpha = beta = 1: energy bracket holds with near equality
  auto A = operators::constant_coefficient(mesh, 1.0);
  auto sigma = lebesgue(mesh);
  auto [u, rep] = solve_singular(mesh, A, sigma, lambda);
  auto bounds = verify_bounds(u, A, sigma, lambda, 1.0, 1.0);
  CHECK(bounds.energy_pass);

  // general alpha, beta
  auto A2 = operators::scalar_coefficient(
      mesh, [](double x, double) { return x < 0.5 ? 0.5 : 2.0; });
  auto [u2, rep2] = solve_singular(mesh, A2, sigma, lambda);
  auto bounds2 = verify_bounds(u2, A2, sigma, lambda, A2.alpha, A2.beta);
  CHECK(bounds2.energy_pass);

  // pointwise bound for core-supported measures
  auto core = truncate_to_core(sigma, 0.25);
  auto [u3, rep3] = solve_singular(mesh, A2, core, lambda);
  auto bounds3 = verify_bounds(u3, A2, core, lambda, A2.alpha, A2.beta);
  CHECK(bounds3.pointwise_checked);
  CHECK(bounds3.pointwise_pass);

  // negative control: a corrupted solution violates the bracket
  std::vector<double> bad(u.values());
  for (double& v : bad) v *= 2.0;
  auto bad_bounds = verify_bounds(FeFunction(mesh, bad, true), A, sigma, lambda, 1.0, 1.0);
  CHECK_FALSE(bad_bounds.energy_pass);
}

TEST_CASE("manufactured solution on the square, lambda = 1") {
  // u = sin(pi x) sin(pi y), sigma = 2 pi^2 u^2 dx
  auto exact = [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); };
  double prev = 0.0;
  for (int k = 0; k < 3; ++k) {
    auto mesh = build_square_mesh(8 << k);
    auto A = operators::constant_coefficient(mesh, 1.0);
    auto sigma = density_measure(mesh, [&](double x, double y) {
      double u = exact(x, y);
      return 2.0 * M_PI * M_PI * u * u;
    });
    auto [u, report] = solve_singular(mesh, A, sigma, 1.0);
    double err = l2_error(u, exact);
    if (k > 0) CHECK(prev / err > 3.0);
    prev = err;
  }
}

TEST_CASE("stability estimate for proportional densities") {
  // sigma = dx, nu = (1+t) dx: |u - v|_{H1} = ((1+t)^{1/(1+lambda)} - 1) |grad u|
  auto mesh = build_interval_mesh(256);
  auto A = operators::constant_coefficient(mesh, 1.0);
  auto sigma = lebesgue(mesh);
  double lambda = 0.5;
  auto [u, ru] = solve_singular(mesh, A, sigma, lambda);
  for (double t : {0.1, 1.0}) {
    auto nu = density_measure(mesh, [&](double, double) { return 1.0 + t; });
    auto [v, rv] = solve_singular(mesh, A, nu, lambda);
    std::vector<double> dvals(v.values());
    for (int i = 0; i < mesh->vertex_count(); ++i) dvals[i] -= u[i];
    double lhs = h1_seminorm(FeFunction(mesh, dvals, true));
    double expect = (std::pow(1.0 + t, 1.0 / (1.0 + lambda)) - 1.0) * h1_seminorm(u);
    CHECK(lhs == Catch::Approx(expect).epsilon(1e-7));
    double rhs = std::pow(potential::d_lambda(sigma, nu, lambda), 1.0 / (1.0 + lambda));
    CHECK(lhs <= rhs * 1.02);
  }
}
