#pragma once
// Gauss quadrature on the reference triangle and the reference edge.
//
// Triangle rules use barycentric points and weights that sum to one, so a
// physical integral is area(T) * sum_q w_q f(x_q).  Degrees 1-6 come from
// published symmetric rules with positive weights; degrees 7-10 fall back to
// a Duffy-type tensor rule collapsed onto the triangle, which keeps all
// weights positive at the cost of a few extra points.

#include <array>
#include <cmath>
#include <vector>

#include "sddi/common.hpp"

namespace sddi {

struct QuadratureRule {
  std::vector<std::array<double, 3>> points;  // barycentric (l0, l1, l2)
  std::vector<double> weights;                // sum to 1
  int degree = 0;                             // guaranteed exactness
  int size() const { return static_cast<int>(points.size()); }
};

struct EdgeQuadratureRule {
  std::vector<double> points;   // parameter t in (0,1) along the edge
  std::vector<double> weights;  // sum to 1, scale by edge length on use
  int degree = 0;
};

namespace detail {

// Gauss-Legendre nodes/weights on [0,1] computed by Newton iteration on the
// Legendre recurrence; converges to machine precision in a few steps.
inline void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 + t);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

inline void push_orbit3(QuadratureRule& r, double a, double w) {
  // Three permutations of (1-2a, a, a).
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({b, a, a});
  r.points.push_back({a, b, a});
  r.points.push_back({a, a, b});
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

inline void push_orbit6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.points.push_back({a, b, c});
  r.points.push_back({a, c, b});
  r.points.push_back({b, a, c});
  r.points.push_back({b, c, a});
  r.points.push_back({c, a, b});
  r.points.push_back({c, b, a});
  for (int i = 0; i < 6; ++i) r.weights.push_back(w);
}

}  // namespace detail

inline QuadratureRule make_quadrature(int degree) {
  require(degree >= 1 && degree <= 10,
          "make_quadrature: degree must be in [1,10], got " + std::to_string(degree));
  QuadratureRule r;
  if (degree <= 1) {
    r.degree = 1;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(1.0);
  } else if (degree == 2) {
    r.degree = 2;
    detail::push_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
  } else if (degree <= 4) {
    r.degree = 4;
    detail::push_orbit3(r, 0.44594849091596488631832925388305199, 0.22338158967801146569500700843312280);
    detail::push_orbit3(r, 0.09157621350977074345957146340220151, 0.10995174365532186763832632490021053);
  } else if (degree == 5) {
    r.degree = 5;
    const double s15 = std::sqrt(15.0);
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(9.0 / 40.0);
    detail::push_orbit3(r, (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
    detail::push_orbit3(r, (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
  } else if (degree == 6) {
    r.degree = 6;
    detail::push_orbit3(r, 0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
    detail::push_orbit3(r, 0.06308901449150222834033160287082, 0.05084490637020681692093680910687);
    detail::push_orbit6(r, 0.05314504984481694735324967163140, 0.31035245103378440541660773395655,
                        0.08285107561837357519355345642044);
  } else {
    // Duffy collapse of a tensor Gauss rule: x = s(1-t), y = t with Jacobian
    // (1-t); exact for total degree d when 2n-1 >= d+1.
    const int n = (degree + 3) / 2;
    std::vector<double> gx, gw;
    detail::gauss_legendre_01(n, gx, gw);
    r.degree = degree;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double x = gx[i] * (1.0 - gx[j]);
        const double y = gx[j];
        r.points.push_back({1.0 - x - y, x, y});
        r.weights.push_back(2.0 * gw[i] * gw[j] * (1.0 - gx[j]));
      }
    }
  }
  return r;
}

inline EdgeQuadratureRule make_edge_quadrature(int degree) {
  require(degree >= 1 && degree <= 21, "make_edge_quadrature: degree out of range");
  const int n = (degree + 2) / 2;
  EdgeQuadratureRule r;
  r.degree = 2 * n - 1;
  detail::gauss_legendre_01(n, r.points, r.weights);
  return r;
}

}  // namespace sddi
