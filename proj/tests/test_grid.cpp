#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "selab/common.hpp"
#include "selab/grid.hpp"

using namespace selab;
using namespace selab::grid;

TEST_CASE("interval mesh basics") {
  auto mesh = build_interval_mesh(2);
  CHECK(mesh->vertex_count() == 3);
  CHECK(mesh->interior_count() == 1);
  CHECK(mesh->h == 0.5);

  auto m4 = build_interval_mesh(4);
  std::vector<double> expect = {0.0, 0.25, 0.5, 0.75, 1.0};
  CHECK(m4->vx == expect);
  CHECK(m4->boundary[0]);
  CHECK(m4->boundary[4]);
  CHECK_FALSE(m4->boundary[2]);

  CHECK_THROWS_WITH(build_interval_mesh(1), "no interior degrees of freedom");
}

TEST_CASE("square mesh counts") {
  auto m2 = build_square_mesh(2);
  CHECK(m2->vertex_count() == 9);
  CHECK(m2->element_count() == 8);
  CHECK(m2->interior_count() == 1);

  auto m4 = build_square_mesh(4);
  CHECK(m4->vertex_count() == 25);
  CHECK(m4->element_count() == 32);
  CHECK(m4->interior_count() == 9);

  CHECK_THROWS_WITH(build_square_mesh(1), "no interior degrees of freedom");

  // elements tile the square
  double area = 0.0;
  for (int e = 0; e < m4->element_count(); ++e) area += m4->element_measure(e);
  CHECK(area == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("p1 interpolation") {
  auto mesh = build_interval_mesh(4);
  auto one = p1_interpolate(mesh, [](double, double) { return 1.0; }, false);
  for (double v : one.values()) CHECK(v == 1.0);

  auto ident = p1_interpolate(mesh, [](double x, double) { return x; }, false);
  CHECK(ident.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});

  auto s = p1_interpolate(mesh, [](double x, double) { return std::sin(M_PI * x); }, true);
  CHECK(s[2] == Catch::Approx(1.0));
  CHECK(s[0] == 0.0);

  CHECK_THROWS_WITH(
      p1_interpolate(mesh, [](double x, double) { return 1.0 / x; }, false),
      "non-interpolable");
}

TEST_CASE("norms on known functions") {
  auto mesh = build_interval_mesh(8);
  auto lin = p1_interpolate(mesh, [](double x, double) { return x; }, false);
  CHECK(h1_seminorm(lin) == Catch::Approx(1.0).epsilon(1e-14));

  // hat at 0.5 on the n=2 mesh: slopes +-2, integral of slope^2 is 4
  auto m2 = build_interval_mesh(2);
  FeFunction hat(m2, {0.0, 1.0, 0.0}, true);
  CHECK(h1_seminorm(hat) == Catch::Approx(2.0).epsilon(1e-14));

  auto one = p1_interpolate(mesh, [](double, double) { return 1.0; }, false);
  CHECK(l2_norm(one) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("poincare inequality on random conforming functions") {
  auto mesh = build_interval_mesh(32);
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> vals(mesh->vertex_count(), 0.0);
    for (int i : mesh->interior_vertices) vals[i] = rng.uniform(-1.0, 1.0);
    FeFunction u(mesh, std::move(vals), true);
    CHECK(l2_norm(u) <= h1_seminorm(u) / M_PI + 1e-14);
  }
}

TEST_CASE("h1 seminorm is absolutely homogeneous") {
  auto mesh = build_interval_mesh(16);
  Rng rng(7);
  std::vector<double> vals(mesh->vertex_count(), 0.0);
  for (int i : mesh->interior_vertices) vals[i] = rng.uniform(-1.0, 1.0);
  FeFunction u(mesh, vals, true);
  double base = h1_seminorm(u);
  for (double t : {-3.5, 0.25, 10.0}) {
    std::vector<double> scaled(vals);
    for (double& v : scaled) v *= t;
    FeFunction tu(mesh, std::move(scaled), true);
    CHECK(h1_seminorm(tu) == Catch::Approx(std::abs(t) * base).epsilon(1e-13));
  }
}

TEST_CASE("interpolation l2 error decays at second order") {
  auto f = [](double x, double) { return std::sin(M_PI * x); };
  const double exact = 1.0 / std::sqrt(2.0);
  double prev_err = 0.0;
  for (int k = 0; k < 4; ++k) {
    int n = 16 << k;
    auto mesh = build_interval_mesh(n);
    double err = std::abs(l2_norm(p1_interpolate(mesh, f, true)) - exact);
    if (k > 0) CHECK(prev_err / err > 3.0);
    prev_err = err;
  }
}

TEST_CASE("field dump csv format") {
  auto mesh = build_interval_mesh(2);
  FeFunction u(mesh, {0.0, 0.25, 0.0}, true);
  std::ostringstream os;
  write_field_csv(u, os);
  CHECK(os.str() == "x,value\n0,0\n0.5,0.25\n1,0\n");

  auto sq = build_square_mesh(2);
  std::ostringstream os2;
  write_field_csv(FeFunction::zero(sq), os2);
  CHECK(os2.str().substr(0, 10) == "x,y,value\n");
}

TEST_CASE("conforming function must vanish on the boundary") {
  auto mesh = build_interval_mesh(4);
  CHECK_THROWS(FeFunction(mesh, {1.0, 0.0, 0.0, 0.0, 0.0}, true));
  CHECK_NOTHROW(FeFunction(mesh, {1.0, 0.0, 0.0, 0.0, 0.0}, false));
}
