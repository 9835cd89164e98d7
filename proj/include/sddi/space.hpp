#pragma once
// Finite element spaces on a TriMesh.  Scalar dof layout is vertices first,
// then edge midpoints (P2), then cell bubbles (MINI).  Vector spaces
// interleave components: global dof = scalar_dof * components + component.

#include <map>
#include <set>
#include <vector>

#include "sddi/elements.hpp"
#include "sddi/mesh.hpp"
#include "sddi/quadrature.hpp"

namespace sddi {

struct ElementGeometry {
  Vec2 v0;
  Mat2 J, JinvT;
  double area = 0.0;

  Vec2 map(const std::array<double, 3>& l) const {
    return v0 + J * Vec2(l[1], l[2]);
  }
};

inline ElementGeometry geometry(const TriMesh& m, int t) {
  const auto& tri = m.triangles[t];
  ElementGeometry g;
  g.v0 = m.vertices[tri[0]];
  g.J.col(0) = m.vertices[tri[1]] - g.v0;
  g.J.col(1) = m.vertices[tri[2]] - g.v0;
  const double det = g.J(0, 0) * g.J(1, 1) - g.J(0, 1) * g.J(1, 0);
  require(det > 0.0, "geometry: degenerate or flipped triangle " + std::to_string(t));
  g.area = 0.5 * det;
  g.JinvT << g.J(1, 1), -g.J(1, 0), -g.J(0, 1), g.J(0, 0);
  g.JinvT /= det;
  return g;
}

struct FunctionSpace {
  const TriMesh* mesh = nullptr;
  ElementKind kind = ElementKind::P1;
  int components = 1;
  int n_vertex = 0, n_edge = 0, n_bubble = 0, n_scalar = 0;
  std::vector<std::array<int, 3>> tri_edge;  // per triangle: local edge m -> global edge id
  std::vector<Vec2> node;                    // location of each scalar dof

  int dofs() const { return n_scalar * components; }
  int dof(int scalar, int comp) const { return scalar * components + comp; }
  int local_count() const { return local_dof_count(kind); }

  // Global scalar dofs of triangle t in local order.
  void scalar_dofs(int t, int out[6]) const {
    const auto& tri = mesh->triangles[t];
    out[0] = tri[0];
    out[1] = tri[1];
    out[2] = tri[2];
    if (kind == ElementKind::P2) {
      for (int m = 0; m < 3; ++m) out[3 + m] = n_vertex + tri_edge[t][m];
    } else if (kind == ElementKind::P1Bubble) {
      out[3] = n_vertex + t;
    }
  }
};

inline FunctionSpace make_space(const TriMesh& mesh, ElementKind kind, int components) {
  require(components == 1 || components == 2, "make_space: components must be 1 or 2");
  FunctionSpace s;
  s.mesh = &mesh;
  s.kind = kind;
  s.components = components;
  s.n_vertex = mesh.nv();

  if (kind == ElementKind::P2) {
    std::map<std::pair<int, int>, int> edge_id;
    for (const auto& tri : mesh.triangles)
      for (int m = 0; m < 3; ++m) {
        int a = tri[(m + 1) % 3], b = tri[(m + 2) % 3];
        edge_id[{std::min(a, b), std::max(a, b)}] = 0;
      }
    int id = 0;
    for (auto& [e, v] : edge_id) v = id++;
    s.n_edge = id;
    s.tri_edge.resize(mesh.nt());
    for (int t = 0; t < mesh.nt(); ++t)
      for (int m = 0; m < 3; ++m) {
        int a = mesh.triangles[t][(m + 1) % 3], b = mesh.triangles[t][(m + 2) % 3];
        s.tri_edge[t][m] = edge_id.at({std::min(a, b), std::max(a, b)});
      }
  } else if (kind == ElementKind::P1Bubble) {
    s.n_bubble = mesh.nt();
  }
  s.n_scalar = s.n_vertex + s.n_edge + s.n_bubble;

  s.node.resize(s.n_scalar);
  for (int v = 0; v < mesh.nv(); ++v) s.node[v] = mesh.vertices[v];
  if (kind == ElementKind::P2) {
    for (int t = 0; t < mesh.nt(); ++t)
      for (int m = 0; m < 3; ++m) {
        int a = mesh.triangles[t][(m + 1) % 3], b = mesh.triangles[t][(m + 2) % 3];
        s.node[s.n_vertex + s.tri_edge[t][m]] = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
      }
  } else if (kind == ElementKind::P1Bubble) {
    for (int t = 0; t < mesh.nt(); ++t) {
      const auto& tri = mesh.triangles[t];
      s.node[s.n_vertex + t] =
          (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Boundary dofs.

// Scalar dofs sitting on tagged edges with one of the given tags.
inline std::vector<int> boundary_scalar_dofs(const FunctionSpace& s,
                                             const std::set<std::string>& tags) {
  std::set<int> out;
  std::map<std::pair<int, int>, int> edge_of;
  if (s.kind == ElementKind::P2) {
    for (int t = 0; t < s.mesh->nt(); ++t)
      for (int m = 0; m < 3; ++m) {
        int a = s.mesh->triangles[t][(m + 1) % 3], b = s.mesh->triangles[t][(m + 2) % 3];
        edge_of[{std::min(a, b), std::max(a, b)}] = s.tri_edge[t][m];
      }
  }
  for (const auto& be : s.mesh->boundary) {
    if (!tags.count(be.tag)) continue;
    out.insert(be.a);
    out.insert(be.b);
    if (s.kind == ElementKind::P2) {
      auto it = edge_of.find({std::min(be.a, be.b), std::max(be.a, be.b)});
      require(it != edge_of.end(), "boundary_scalar_dofs: tagged edge not in mesh");
      out.insert(s.n_vertex + it->second);
    }
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Nodal interpolation.

inline Vec interpolate(const FunctionSpace& s, const std::function<double(double, double)>& f) {
  require(s.components == 1, "interpolate: scalar function on vector space");
  Vec c = Vec::Zero(s.dofs());
  const int nv_ne = s.n_vertex + s.n_edge;
  for (int i = 0; i < nv_ne; ++i) c[i] = f(s.node[i].x(), s.node[i].y());
  // Bubble coefficient: match the value at the centroid on top of the P1 part.
  for (int b = 0; b < s.n_bubble; ++b) {
    const auto& tri = s.mesh->triangles[b];
    const Vec2 cpt = s.node[s.n_vertex + b];
    c[s.n_vertex + b] = f(cpt.x(), cpt.y()) - (c[tri[0]] + c[tri[1]] + c[tri[2]]) / 3.0;
  }
  return c;
}

inline Vec interpolate_vector(const FunctionSpace& s,
                              const std::function<Vec2(double, double)>& f) {
  require(s.components == 2, "interpolate_vector: needs a two-component space");
  Vec c = Vec::Zero(s.dofs());
  const int nv_ne = s.n_vertex + s.n_edge;
  for (int i = 0; i < nv_ne; ++i) {
    const Vec2 v = f(s.node[i].x(), s.node[i].y());
    c[s.dof(i, 0)] = v.x();
    c[s.dof(i, 1)] = v.y();
  }
  for (int b = 0; b < s.n_bubble; ++b) {
    const auto& tri = s.mesh->triangles[b];
    const Vec2 cpt = s.node[s.n_vertex + b];
    const Vec2 v = f(cpt.x(), cpt.y());
    for (int comp = 0; comp < 2; ++comp) {
      const double p1_part = (c[s.dof(tri[0], comp)] + c[s.dof(tri[1], comp)] +
                              c[s.dof(tri[2], comp)]) / 3.0;
      c[s.dof(s.n_vertex + b, comp)] = v[comp] - p1_part;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Point evaluation of FE functions on a known triangle.

struct ScalarEval {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
};

inline ScalarEval eval_scalar(const FunctionSpace& s, const Vec& coef, int t,
                              const std::array<double, 3>& l) {
  const ElementGeometry g = geometry(*s.mesh, t);
  const BasisEval b = eval_basis(s.kind, l);
  int sd[6];
  s.scalar_dofs(t, sd);
  ScalarEval out;
  for (int i = 0; i < b.n; ++i) {
    out.value += coef[sd[i]] * b.value[i];
    out.grad += coef[sd[i]] * (g.JinvT * b.grad[i]);
  }
  return out;
}

struct VectorEval {
  Vec2 value = Vec2::Zero();
  Mat2 grad = Mat2::Zero();  // grad(i,j) = d u_i / d x_j
};

inline VectorEval eval_vector(const FunctionSpace& s, const Vec& coef, int t,
                              const std::array<double, 3>& l) {
  const ElementGeometry g = geometry(*s.mesh, t);
  const BasisEval b = eval_basis(s.kind, l);
  int sd[6];
  s.scalar_dofs(t, sd);
  VectorEval out;
  for (int i = 0; i < b.n; ++i) {
    const Vec2 gp = g.JinvT * b.grad[i];
    for (int comp = 0; comp < 2; ++comp) {
      const double c = coef[s.dof(sd[i], comp)];
      out.value[comp] += c * b.value[i];
      out.grad(comp, 0) += c * gp.x();
      out.grad(comp, 1) += c * gp.y();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weighted mass matrix, the assembly workhorse.  Errors out on a negative
// weight sample; a zero weight is legal and yields a zero contribution.

inline SpMat assemble_scalar_mass(const FunctionSpace& s, const QuadratureRule& quad,
                                  const ScalarField& weight) {
  std::vector<Triplet> trips;
  const int nl = s.local_count();
  int sd[6];
  for (int t = 0; t < s.mesh->nt(); ++t) {
    const ElementGeometry g = geometry(*s.mesh, t);
    s.scalar_dofs(t, sd);
    Eigen::Matrix<double, 6, 6> local = Eigen::Matrix<double, 6, 6>::Zero();
    for (int q = 0; q < quad.size(); ++q) {
      const BasisEval b = eval_basis(s.kind, quad.points[q]);
      const Vec2 x = g.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      require(w >= 0.0, "assemble_scalar_mass: negative weight at quadrature point");
      const double scale = g.area * quad.weights[q] * w;
      for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j) local(i, j) += scale * b.value[i] * b.value[j];
    }
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j)
        for (int c = 0; c < s.components; ++c)
          trips.emplace_back(s.dof(sd[i], c), s.dof(sd[j], c), local(i, j));
  }
  SpMat M(s.dofs(), s.dofs());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

}  // namespace sddi
