#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "selab/common.hpp"
#include "selab/grid.hpp"
#include "selab/operators.hpp"

using namespace selab;
using namespace selab::grid;
using namespace selab::operators;

TEST_CASE("ellipticity certification") {
  auto mesh = build_square_mesh(2);

  auto I = matrix_coefficient(mesh, {1, 0, 0, 1});
  auto [a1, b1] = check_ellipticity(I);
  CHECK(a1 == Catch::Approx(1.0));
  CHECK(b1 == Catch::Approx(1.0));

  auto D = matrix_coefficient(mesh, {2, 0, 0, 0.5});
  auto [a2, b2] = check_ellipticity(D);
  CHECK(a2 == Catch::Approx(0.5));
  CHECK(b2 == Catch::Approx(2.0));

  // skew part does not help coercivity but raises beta
  auto S = matrix_coefficient(mesh, {1, 1, -1, 1});
  auto [a3, b3] = check_ellipticity(S);
  CHECK(a3 == Catch::Approx(1.0));
  CHECK(b3 == Catch::Approx(2.0));

  CHECK_THROWS_WITH(matrix_coefficient(mesh, {0, 0, 0, 1}), "not coercive");
  CHECK_THROWS_WITH(matrix_coefficient(mesh, {-1, 0, 0, 1}), "not coercive");

  auto line = build_interval_mesh(4);
  auto scalar = scalar_coefficient(line, [](double x, double) { return 2.0 - x; });
  auto [a4, b4] = check_ellipticity(scalar);
  CHECK(a4 == Catch::Approx(2.0 - 7.0 / 8.0));
  CHECK(b4 == Catch::Approx(2.0 - 1.0 / 8.0));
  CHECK_THROWS_WITH(scalar_coefficient(line, [](double x, double) { return x - 0.5; }),
                    "not coercive");
}

TEST_CASE("identity solve returns the load") {
  operators::SparseSpdOperator I;
  I.n = 3;
  I.row_ptr = {0, 1, 2, 3};
  I.col = {0, 1, 2};
  I.val = {1.0, 1.0, 1.0};
  auto x = solve_spd(I, {3.0, -1.0, 0.5});
  CHECK(x[0] == Catch::Approx(3.0));
  CHECK(x[1] == Catch::Approx(-1.0));
  CHECK(x[2] == Catch::Approx(0.5));
}

TEST_CASE("stiffness matrices match hand assembly") {
  // 1D, n=2, A=1: single interior dof, K = [4]
  auto m2 = build_interval_mesh(2);
  auto K2 = assemble_stiffness(m2, constant_coefficient(m2, 1.0));
  CHECK(K2.n == 1);
  CHECK(K2.diagonal(0) == Catch::Approx(4.0));

  // 1D, n=4: interior row stencil (-4, 8, -4)
  auto m4 = build_interval_mesh(4);
  auto K4 = assemble_stiffness(m4, constant_coefficient(m4, 1.0));
  CHECK(K4.diagonal(1) == Catch::Approx(8.0));
  CHECK(K4.at(1, 0) == Catch::Approx(-4.0));
  CHECK(K4.at(1, 2) == Catch::Approx(-4.0));

  // 2D uniform right-triangle mesh, A=I: 5-point stencil
  auto sq = build_square_mesh(4);
  auto K = assemble_stiffness(sq, constant_coefficient(sq, 1.0));
  int center = -1;
  for (int i = 0; i < sq->interior_count(); ++i) {
    int v = sq->interior_vertices[i];
    if (sq->vx[v] == 0.5 && sq->vy[v] == 0.5) center = i;
  }
  REQUIRE(center >= 0);
  CHECK(K.diagonal(center) == Catch::Approx(4.0));
  int offdiag_nonzero = 0;
  for (int k = K.row_ptr[center]; k < K.row_ptr[center + 1]; ++k) {
    if (K.col[k] == center) continue;
    double v = K.val[k];
    if (std::abs(v) > 1e-14) {
      CHECK(v == Catch::Approx(-1.0));
      ++offdiag_nonzero;
    }
  }
  CHECK(offdiag_nonzero == 4);
}

TEST_CASE("1D stiffness is an M-matrix") {
  auto mesh = build_interval_mesh(16);
  auto K = assemble_stiffness(mesh, scalar_coefficient(mesh, [](double x, double) {
                                return 1.0 + 0.5 * std::sin(7 * x);
                              }));
  for (int i = 0; i < K.n; ++i) {
    double row_sum = 0.0;
    for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
      if (K.col[k] != i) CHECK(K.val[k] <= 0.0);
      row_sum += K.val[k];
    }
    CHECK(row_sum >= -1e-12);
  }
}

TEST_CASE("lumped mass") {
  auto m4 = build_interval_mesh(4);
  auto d4 = assemble_lumped_mass(m4);
  CHECK(d4[1] == Catch::Approx(0.25));
  double total = 0.0;
  for (double v : d4) total += v;
  CHECK(total == Catch::Approx(1.0));

  auto m2 = build_interval_mesh(2);
  CHECK(assemble_lumped_mass(m2)[1] == Catch::Approx(0.5));

  auto sq = build_square_mesh(8);
  auto d = assemble_lumped_mass(sq);
  double tot = 0.0;
  for (double v : d) tot += v;
  CHECK(tot == Catch::Approx(1.0));
}

TEST_CASE("cg solves") {
  auto m2 = build_interval_mesh(2);
  auto K = assemble_stiffness(m2, constant_coefficient(m2, 1.0));
  auto x = solve_spd(K, {1.0});
  CHECK(x[0] == Catch::Approx(0.25));

  // nodal exactness in 1D: load from sigma = dx gives u(x) = x(1-x)/2 at nodes
  auto m4 = build_interval_mesh(4);
  auto K4 = assemble_stiffness(m4, constant_coefficient(m4, 1.0));
  std::vector<double> b(3, 0.25);
  auto u = solve_spd(K4, b);
  CHECK(u[1] == Catch::Approx(0.125).epsilon(1e-12));

  CHECK_THROWS_WITH(solve_spd(K4, {1.0, kInf, 0.0}), "invalid load");
}

TEST_CASE("cg recovers random solutions") {
  auto mesh = build_interval_mesh(64);
  auto K = assemble_stiffness(mesh, constant_coefficient(mesh, 1.0));
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x(K.n);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    auto b = K.apply(x);
    auto y = solve_spd(K, b, 1e-13);
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < K.n; ++i) {
      err = std::max(err, std::abs(x[i] - y[i]));
      scale = std::max(scale, std::abs(x[i]));
    }
    // kappa(K) ~ (2n/pi)^2 here
    CHECK(err <= 1e-13 * (4.0 * 64 * 64 / (M_PI * M_PI)) * scale * 10);
  }
}

TEST_CASE("discrete coercivity and boundedness") {
  auto mesh = build_square_mesh(6);
  auto A = matrix_coefficient(mesh, {2, 0.3, 0.3, 1});
  auto [alpha, beta] = check_ellipticity(A);
  auto K = assemble_stiffness(mesh, A);
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> uv(mesh->vertex_count(), 0.0), vv(mesh->vertex_count(), 0.0);
    for (int i : mesh->interior_vertices) {
      uv[i] = rng.uniform(-1.0, 1.0);
      vv[i] = rng.uniform(-1.0, 1.0);
    }
    FeFunction u(mesh, uv, true), v(mesh, vv, true);
    auto ui = restrict_interior(*mesh, uv);
    auto vi = restrict_interior(*mesh, vv);
    double kuu = K.quadratic_form(ui);
    double h1u = h1_seminorm(u), h1v = h1_seminorm(v);
    CHECK(kuu >= alpha * h1u * h1u * (1 - 1e-12));
    auto Ku = K.apply(ui);
    double kuv = 0.0;
    for (int i = 0; i < K.n; ++i) kuv += Ku[i] * vi[i];
    CHECK(std::abs(kuv) <= beta * h1u * h1v * (1 + 1e-12));
  }
}
