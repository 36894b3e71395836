#pragma once

#include <cmath>
#include <vector>

#include "selab/common.hpp"

namespace selab::quadrature {

struct Rule1d {
  std::vector<double> points;   // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre nodes/weights on [0,1], computed by Newton iteration on the
// Legendre polynomial. Exact for polynomials of degree 2n-1.
inline Rule1d gauss_legendre(int n) {
  if (n < 1) throw Error("gauss rule needs at least one point");
  Rule1d rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // initial guess on [-1,1]
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 1) ? x : p1;
      double pm = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

inline int points_for_degree(int degree) { return (degree + 2) / 2; }

struct TrianglePoint {
  double b0, b1, b2;  // barycentric coordinates
  double weight;      // relative to triangle area, weights sum to 1
};

// 7-point degree-5 rule (Hammer/Strang-Fix).
inline const std::vector<TrianglePoint>& triangle_rule_deg5() {
  static const std::vector<TrianglePoint> rule = [] {
    std::vector<TrianglePoint> r;
    const double s15 = std::sqrt(15.0);
    r.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40});
    const double a = (6.0 - s15) / 21.0, wa = (155.0 - s15) / 1200.0;
    const double b = (6.0 + s15) / 21.0, wb = (155.0 + s15) / 1200.0;
    r.push_back({a, a, 1 - 2 * a, wa});
    r.push_back({a, 1 - 2 * a, a, wa});
    r.push_back({1 - 2 * a, a, a, wa});
    r.push_back({b, b, 1 - 2 * b, wb});
    r.push_back({b, 1 - 2 * b, b, wb});
    r.push_back({1 - 2 * b, b, b, wb});
    return r;
  }();
  return rule;
}

// 3-point degree-2 rule (edge midpoints).
inline const std::vector<TrianglePoint>& triangle_rule_deg2() {
  static const std::vector<TrianglePoint> rule = {
      {0.5, 0.5, 0.0, 1.0 / 3}, {0.0, 0.5, 0.5, 1.0 / 3}, {0.5, 0.0, 0.5, 1.0 / 3}};
  return rule;
}

}  // namespace selab::quadrature
