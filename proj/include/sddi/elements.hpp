#pragma once
// Scalar Lagrange bases on the reference triangle: P1, P2 and the MINI
// enrichment P1 + cubic bubble.  Reference triangle has vertices (0,0), (1,0),
// (0,1); barycentric coordinates are l0 = 1-x-y, l1 = x, l2 = y.
//
// Local dof order follows the global convention: vertices first, then edge
// midpoints (P2, edge m sits opposite vertex m), then the cell bubble.

#include <array>
#include <vector>

#include "sddi/common.hpp"

namespace sddi {

enum class ElementKind { P1, P2, P1Bubble };

inline int local_dof_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::P1: return 3;
    case ElementKind::P2: return 6;
    case ElementKind::P1Bubble: return 4;
  }
  return 0;
}

inline int polynomial_degree(ElementKind kind) {
  switch (kind) {
    case ElementKind::P1: return 1;
    case ElementKind::P2: return 2;
    case ElementKind::P1Bubble: return 3;
  }
  return 0;
}

// Values and reference gradients (w.r.t. x = l1, y = l2) at one barycentric
// point.  Arrays are sized for the largest element.
struct BasisEval {
  std::array<double, 6> value{};
  std::array<Vec2, 6> grad{};
  int n = 0;
};

inline BasisEval eval_basis(ElementKind kind, const std::array<double, 3>& l) {
  const double l0 = l[0], l1 = l[1], l2 = l[2];
  // Barycentric gradients w.r.t. reference (x, y).
  const Vec2 g0(-1.0, -1.0), g1(1.0, 0.0), g2(0.0, 1.0);
  BasisEval out;
  switch (kind) {
    case ElementKind::P1:
      out.n = 3;
      out.value = {l0, l1, l2};
      out.grad = {g0, g1, g2};
      break;
    case ElementKind::P2:
      out.n = 6;
      out.value = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
                   4 * l1 * l2, 4 * l0 * l2, 4 * l0 * l1};
      out.grad = {g0 * (4 * l0 - 1), g1 * (4 * l1 - 1), g2 * (4 * l2 - 1),
                  4 * (g1 * l2 + g2 * l1), 4 * (g0 * l2 + g2 * l0), 4 * (g0 * l1 + g1 * l0)};
      break;
    case ElementKind::P1Bubble:
      out.n = 4;
      out.value = {l0, l1, l2, 27 * l0 * l1 * l2};
      out.grad = {g0, g1, g2, 27 * (g0 * l1 * l2 + g1 * l0 * l2 + g2 * l0 * l1)};
      break;
  }
  return out;
}

// Reference interpolation nodes in local dof order (barycentric).
inline std::vector<std::array<double, 3>> reference_nodes(ElementKind kind) {
  std::vector<std::array<double, 3>> n = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  if (kind == ElementKind::P2) {
    n.push_back({0, 0.5, 0.5});
    n.push_back({0.5, 0, 0.5});
    n.push_back({0.5, 0.5, 0});
  } else if (kind == ElementKind::P1Bubble) {
    n.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  }
  return n;
}

}  // namespace sddi
