#pragma once
// Weighted forms of the coupled problem.  Every volume form integrates over
// the whole mesh with pointwise weights:
//
//   viscous     2*mu * int D(u):D(v) * w
//   bjs         alpha * int (u.tau)(v.tau) * |grad phi|
//   darcy       int (kappa grad p).grad q * w   and   c0 * int p q * w
//   divergence  B with q^T B v = -int q div(v) * w      (w == 1 if unweighted)
//   coupling    C_pu = +int q u.grad(phi),  C_up = -C_pu^T
//
// The coupling pair is assembled from one sample set so the antisymmetry is
// exact, which the discrete energy balance relies on.

#include <optional>
#include <set>
#include <vector>

#include "sddi/phasefield.hpp"
#include "sddi/space.hpp"

namespace sddi {

struct PhysicalParams {
  double rho = 1.0;
  double mu = 1.0;
  double c0 = 1.0;
  double alpha_bjs = 1.0;
  Mat2 kappa = Mat2::Identity();
};

inline void validate_params(const PhysicalParams& p) {
  require(p.rho > 0.0, "params: rho must be positive");
  require(p.mu > 0.0, "params: mu must be positive");
  require(p.c0 > 0.0, "params: c0 must be positive");
  require(p.alpha_bjs >= 0.0, "params: alpha_bjs must be nonnegative");
  require(std::abs(p.kappa(0, 1) - p.kappa(1, 0)) <= 1e-14 * p.kappa.norm(),
          "params: kappa must be symmetric");
  require(p.kappa(0, 0) > 0.0 && p.kappa.determinant() > 0.0,
          "params: kappa must be positive definite");
}

// Basis values and reference gradients tabulated at the points of one rule.
struct BasisTable {
  ElementKind kind;
  int n = 0;
  std::vector<BasisEval> at;  // one entry per quadrature point

  BasisTable(ElementKind k, const QuadratureRule& quad) : kind(k), n(local_dof_count(k)) {
    at.reserve(quad.size());
    for (int q = 0; q < quad.size(); ++q) at.push_back(eval_basis(k, quad.points[q]));
  }
};

namespace detail {

inline void check_weight(double w) {
  require(w >= 0.0, "assemble: negative weight at quadrature point");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Volume forms.

inline SpMat assemble_stokes_viscous(const FunctionSpace& u, const QuadratureRule& quad,
                                     double mu, const ScalarField& weight) {
  require(u.components == 2, "viscous form needs a vector space");
  BasisTable tab(u.kind, quad);
  std::vector<Triplet> trips;
  int sd[6];
  std::array<Vec2, 6> g;
  for (int t = 0; t < u.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*u.mesh, t);
    u.scalar_dofs(t, sd);
    Eigen::Matrix<double, 12, 12> local = Eigen::Matrix<double, 12, 12>::Zero();
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      detail::check_weight(w);
      const double scale = mu * w * geo.area * quad.weights[q];
      for (int i = 0; i < tab.n; ++i) g[i] = geo.JinvT * tab.at[q].grad[i];
      for (int i = 0; i < tab.n; ++i) {
        for (int j = 0; j < tab.n; ++j) {
          // 2 D(phi_i e_c) : D(phi_j e_d) contracted per component pair.
          local(2 * i, 2 * j) += scale * (2 * g[i].x() * g[j].x() + g[i].y() * g[j].y());
          local(2 * i, 2 * j + 1) += scale * g[i].y() * g[j].x();
          local(2 * i + 1, 2 * j) += scale * g[i].x() * g[j].y();
          local(2 * i + 1, 2 * j + 1) += scale * (g[i].x() * g[j].x() + 2 * g[i].y() * g[j].y());
        }
      }
    }
    for (int i = 0; i < tab.n; ++i)
      for (int j = 0; j < tab.n; ++j)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d)
            trips.emplace_back(u.dof(sd[i], c), u.dof(sd[j], d), local(2 * i + c, 2 * j + d));
  }
  SpMat K(u.dofs(), u.dofs());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

inline SpMat assemble_bjs(const FunctionSpace& u, const QuadratureRule& quad, double alpha,
                          const PhaseField& pf) {
  require(u.components == 2, "bjs form needs a vector space");
  BasisTable tab(u.kind, quad);
  std::vector<Triplet> trips;
  int sd[6];
  for (int t = 0; t < u.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*u.mesh, t);
    u.scalar_dofs(t, sd);
    Eigen::Matrix<double, 12, 12> local = Eigen::Matrix<double, 12, 12>::Zero();
    bool any = false;
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const DiffuseFrame fr = pf.frame(x.x(), x.y());
      if (!fr.valid) continue;  // below g_min the interface terms vanish
      any = true;
      const double scale = alpha * fr.grad_norm * geo.area * quad.weights[q];
      for (int i = 0; i < tab.n; ++i)
        for (int j = 0; j < tab.n; ++j) {
          const double vv = scale * tab.at[q].value[i] * tab.at[q].value[j];
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
              local(2 * i + c, 2 * j + d) += vv * fr.tau[c] * fr.tau[d];
        }
    }
    if (!any) continue;
    for (int i = 0; i < tab.n; ++i)
      for (int j = 0; j < tab.n; ++j)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d)
            trips.emplace_back(u.dof(sd[i], c), u.dof(sd[j], d), local(2 * i + c, 2 * j + d));
  }
  SpMat K(u.dofs(), u.dofs());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

struct DarcyMatrices {
  SpMat stiffness;  // int (kappa grad p).grad q * w
  SpMat mass;       // c0 * int p q * w
};

inline DarcyMatrices assemble_darcy(const FunctionSpace& p, const QuadratureRule& quad,
                                    const Mat2& kappa, double c0, const ScalarField& weight) {
  require(p.components == 1, "darcy forms need a scalar space");
  BasisTable tab(p.kind, quad);
  std::vector<Triplet> ks, ms;
  int sd[6];
  std::array<Vec2, 6> g;
  for (int t = 0; t < p.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*p.mesh, t);
    p.scalar_dofs(t, sd);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      detail::check_weight(w);
      const double scale = w * geo.area * quad.weights[q];
      for (int i = 0; i < tab.n; ++i) g[i] = geo.JinvT * tab.at[q].grad[i];
      for (int i = 0; i < tab.n; ++i)
        for (int j = 0; j < tab.n; ++j) {
          ks.emplace_back(sd[i], sd[j], scale * g[i].dot(kappa * g[j]));
          ms.emplace_back(sd[i], sd[j], c0 * scale * tab.at[q].value[i] * tab.at[q].value[j]);
        }
    }
  }
  DarcyMatrices out;
  out.stiffness.resize(p.dofs(), p.dofs());
  out.stiffness.setFromTriplets(ks.begin(), ks.end());
  out.mass.resize(p.dofs(), p.dofs());
  out.mass.setFromTriplets(ms.begin(), ms.end());
  return out;
}

// Divergence constraint block: (B v)_q = -int q div(v) * w.
inline SpMat assemble_divergence(const FunctionSpace& u, const FunctionSpace& q,
                                 const QuadratureRule& quad, const ScalarField& weight) {
  require(u.components == 2 && q.components == 1, "divergence block needs vector/scalar spaces");
  require(u.mesh == q.mesh, "divergence block: spaces live on different meshes");
  BasisTable utab(u.kind, quad), qtab(q.kind, quad);
  std::vector<Triplet> trips;
  int sdu[6], sdq[6];
  std::array<Vec2, 6> g;
  for (int t = 0; t < u.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*u.mesh, t);
    u.scalar_dofs(t, sdu);
    q.scalar_dofs(t, sdq);
    for (int qp = 0; qp < quad.size(); ++qp) {
      const Vec2 x = geo.map(quad.points[qp]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      detail::check_weight(w);
      const double scale = w * geo.area * quad.weights[qp];
      for (int i = 0; i < utab.n; ++i) g[i] = geo.JinvT * utab.at[qp].grad[i];
      for (int iq = 0; iq < qtab.n; ++iq)
        for (int j = 0; j < utab.n; ++j)
          for (int c = 0; c < 2; ++c)
            trips.emplace_back(sdq[iq], u.dof(sdu[j], c),
                               -scale * qtab.at[qp].value[iq] * g[j][c]);
    }
  }
  SpMat B(q.dofs(), u.dofs());
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

struct CouplingMatrices {
  SpMat C_pu;  // +int q u.grad(phi): rows darcy, cols velocity
  SpMat C_up;  // -C_pu^T exactly:    rows velocity, cols darcy
};

inline CouplingMatrices assemble_interface_coupling(const FunctionSpace& u,
                                                    const FunctionSpace& p,
                                                    const QuadratureRule& quad,
                                                    const PhaseField& pf) {
  require(u.components == 2 && p.components == 1, "coupling needs vector/scalar spaces");
  require(u.mesh == p.mesh, "coupling: spaces live on different meshes");
  BasisTable utab(u.kind, quad), ptab(p.kind, quad);
  std::vector<Triplet> pu, up;
  int sdu[6], sdp[6];
  for (int t = 0; t < u.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*u.mesh, t);
    u.scalar_dofs(t, sdu);
    p.scalar_dofs(t, sdp);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const Vec2 gphi = pf.grad_phi(x.x(), x.y());
      if (gphi.squaredNorm() == 0.0) continue;
      const double scale = geo.area * quad.weights[q];
      for (int ip = 0; ip < ptab.n; ++ip)
        for (int j = 0; j < utab.n; ++j)
          for (int c = 0; c < 2; ++c) {
            const double v = scale * ptab.at[q].value[ip] * utab.at[q].value[j] * gphi[c];
            pu.emplace_back(sdp[ip], u.dof(sdu[j], c), v);
            up.emplace_back(u.dof(sdu[j], c), sdp[ip], -v);
          }
    }
  }
  CouplingMatrices out;
  out.C_pu.resize(p.dofs(), u.dofs());
  out.C_pu.setFromTriplets(pu.begin(), pu.end());
  out.C_up.resize(u.dofs(), p.dofs());
  out.C_up.setFromTriplets(up.begin(), up.end());
  return out;
}

// ---------------------------------------------------------------------------
// Volume loads.

inline Vec assemble_vector_load(const FunctionSpace& u, const QuadratureRule& quad,
                                const std::function<Vec2(double, double)>& f,
                                const ScalarField& weight) {
  require(u.components == 2, "vector load needs a vector space");
  BasisTable tab(u.kind, quad);
  Vec out = Vec::Zero(u.dofs());
  int sd[6];
  for (int t = 0; t < u.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*u.mesh, t);
    u.scalar_dofs(t, sd);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      detail::check_weight(w);
      const Vec2 fv = f(x.x(), x.y());
      const double scale = w * geo.area * quad.weights[q];
      for (int i = 0; i < tab.n; ++i)
        for (int c = 0; c < 2; ++c)
          out[u.dof(sd[i], c)] += scale * tab.at[q].value[i] * fv[c];
    }
  }
  return out;
}

inline Vec assemble_scalar_load(const FunctionSpace& p, const QuadratureRule& quad,
                                const ScalarField& f, const ScalarField& weight) {
  require(p.components == 1, "scalar load needs a scalar space");
  BasisTable tab(p.kind, quad);
  Vec out = Vec::Zero(p.dofs());
  int sd[6];
  for (int t = 0; t < p.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*p.mesh, t);
    p.scalar_dofs(t, sd);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      detail::check_weight(w);
      const double scale = w * geo.area * quad.weights[q] * f(x.x(), x.y());
      for (int i = 0; i < tab.n; ++i) out[sd[i]] += scale * tab.at[q].value[i];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tagged edges with owner triangle, outward normal and trace info.

struct TaggedEdge {
  int tri = -1;
  int local = -1;  // local index of the opposite vertex
  int va = -1, vb = -1;  // traversal order (m+1)%3 -> (m+2)%3 of the owner
  Vec2 normal = Vec2::Zero();
  double length = 0.0;
  std::string tag;
};

inline std::vector<TaggedEdge> collect_tagged_edges(const TriMesh& mesh,
                                                    const std::set<std::string>& tags) {
  std::map<std::pair<int, int>, std::pair<int, int>> owner;  // edge -> (tri, local)
  for (int t = 0; t < mesh.nt(); ++t)
    for (int m = 0; m < 3; ++m) {
      int a = mesh.triangles[t][(m + 1) % 3], b = mesh.triangles[t][(m + 2) % 3];
      owner[{std::min(a, b), std::max(a, b)}] = {t, m};
    }
  std::vector<TaggedEdge> out;
  for (const auto& be : mesh.boundary) {
    if (!tags.count(be.tag)) continue;
    auto it = owner.find({std::min(be.a, be.b), std::max(be.a, be.b)});
    require(it != owner.end(), "collect_tagged_edges: tagged edge not in mesh");
    TaggedEdge e;
    e.tri = it->second.first;
    e.local = it->second.second;
    e.va = mesh.triangles[e.tri][(e.local + 1) % 3];
    e.vb = mesh.triangles[e.tri][(e.local + 2) % 3];
    const Vec2 d = mesh.vertices[e.vb] - mesh.vertices[e.va];
    e.length = d.norm();
    e.normal = Vec2(d.y(), -d.x()) / e.length;  // outward for a CCW owner
    e.tag = be.tag;
    out.push_back(e);
  }
  return out;
}

// Barycentric coordinates of the point at parameter s along va -> vb.
inline std::array<double, 3> edge_bary(const TaggedEdge& e, double s) {
  std::array<double, 3> l{0.0, 0.0, 0.0};
  l[e.local] = 0.0;
  l[(e.local + 1) % 3] = 1.0 - s;
  l[(e.local + 2) % 3] = s;
  return l;
}

// Weighted traction load: int_e traction(x, n) . v * w ds over tagged edges.
inline Vec assemble_traction_load(
    const FunctionSpace& u, const std::vector<TaggedEdge>& edges, const EdgeQuadratureRule& eq,
    const std::function<Vec2(double, double, const Vec2&)>& traction, const ScalarField& weight) {
  require(u.components == 2, "traction load needs a vector space");
  Vec out = Vec::Zero(u.dofs());
  int sd[6];
  for (const TaggedEdge& e : edges) {
    u.scalar_dofs(e.tri, sd);
    const ElementGeometry geo = geometry(*u.mesh, e.tri);
    for (size_t q = 0; q < eq.points.size(); ++q) {
      const auto l = edge_bary(e, eq.points[q]);
      const BasisEval b = eval_basis(u.kind, l);
      const Vec2 x = geo.map(l);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      detail::check_weight(w);
      const Vec2 tr = traction(x.x(), x.y(), e.normal);
      const double scale = w * e.length * eq.weights[q];
      for (int i = 0; i < b.n; ++i)
        for (int c = 0; c < 2; ++c) out[u.dof(sd[i], c)] += scale * b.value[i] * tr[c];
    }
  }
  return out;
}

// Weighted flux load: int_e flux(x, n) * q * w ds over tagged edges.
inline Vec assemble_flux_load(const FunctionSpace& p, const std::vector<TaggedEdge>& edges,
                              const EdgeQuadratureRule& eq,
                              const std::function<double(double, double, const Vec2&)>& flux,
                              const ScalarField& weight) {
  require(p.components == 1, "flux load needs a scalar space");
  Vec out = Vec::Zero(p.dofs());
  int sd[6];
  for (const TaggedEdge& e : edges) {
    p.scalar_dofs(e.tri, sd);
    const ElementGeometry geo = geometry(*p.mesh, e.tri);
    for (size_t q = 0; q < eq.points.size(); ++q) {
      const auto l = edge_bary(e, eq.points[q]);
      const BasisEval b = eval_basis(p.kind, l);
      const Vec2 x = geo.map(l);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      detail::check_weight(w);
      const double scale = w * e.length * eq.weights[q] * flux(x.x(), x.y(), e.normal);
      for (int i = 0; i < b.n; ++i) out[sd[i]] += scale * b.value[i];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature evaluators on coefficient vectors.  These deliberately do not
// touch the assembled matrices; the energy audit pairs them against the
// operator algebra.

inline double weighted_l2_sq_vector(const FunctionSpace& u, const Vec& coef,
                                    const QuadratureRule& quad, const ScalarField& weight) {
  BasisTable tab(u.kind, quad);
  double acc = 0.0;
  int sd[6];
  for (int t = 0; t < u.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*u.mesh, t);
    u.scalar_dofs(t, sd);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      Vec2 val = Vec2::Zero();
      for (int i = 0; i < tab.n; ++i)
        for (int c = 0; c < 2; ++c) val[c] += coef[u.dof(sd[i], c)] * tab.at[q].value[i];
      acc += w * geo.area * quad.weights[q] * val.squaredNorm();
    }
  }
  return acc;
}

inline double weighted_l2_sq_scalar(const FunctionSpace& p, const Vec& coef,
                                    const QuadratureRule& quad, const ScalarField& weight) {
  BasisTable tab(p.kind, quad);
  double acc = 0.0;
  int sd[6];
  for (int t = 0; t < p.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*p.mesh, t);
    p.scalar_dofs(t, sd);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      double val = 0.0;
      for (int i = 0; i < tab.n; ++i) val += coef[sd[i]] * tab.at[q].value[i];
      acc += w * geo.area * quad.weights[q] * val * val;
    }
  }
  return acc;
}

// 2 * int |D(u)|^2 * w (multiply by mu for the viscous dissipation rate).
inline double sym_gradient_sq_vector(const FunctionSpace& u, const Vec& coef,
                                     const QuadratureRule& quad, const ScalarField& weight) {
  BasisTable tab(u.kind, quad);
  double acc = 0.0;
  int sd[6];
  for (int t = 0; t < u.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*u.mesh, t);
    u.scalar_dofs(t, sd);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      Mat2 grad = Mat2::Zero();
      for (int i = 0; i < tab.n; ++i) {
        const Vec2 g = geo.JinvT * tab.at[q].grad[i];
        for (int c = 0; c < 2; ++c) {
          grad(c, 0) += coef[u.dof(sd[i], c)] * g.x();
          grad(c, 1) += coef[u.dof(sd[i], c)] * g.y();
        }
      }
      const Mat2 D = 0.5 * (grad + grad.transpose());
      acc += 2.0 * w * geo.area * quad.weights[q] * D.squaredNorm();
    }
  }
  return acc;
}

inline double kappa_gradient_sq_scalar(const FunctionSpace& p, const Vec& coef,
                                       const QuadratureRule& quad, const Mat2& kappa,
                                       const ScalarField& weight) {
  BasisTable tab(p.kind, quad);
  double acc = 0.0;
  int sd[6];
  for (int t = 0; t < p.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*p.mesh, t);
    p.scalar_dofs(t, sd);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      Vec2 grad = Vec2::Zero();
      for (int i = 0; i < tab.n; ++i) grad += coef[sd[i]] * (geo.JinvT * tab.at[q].grad[i]);
      acc += w * geo.area * quad.weights[q] * grad.dot(kappa * grad);
    }
  }
  return acc;
}

// int (u.tau)^2 |grad phi| (multiply by alpha for the slip dissipation rate).
inline double tangential_sq_vector(const FunctionSpace& u, const Vec& coef,
                                   const QuadratureRule& quad, const PhaseField& pf) {
  BasisTable tab(u.kind, quad);
  double acc = 0.0;
  int sd[6];
  for (int t = 0; t < u.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*u.mesh, t);
    u.scalar_dofs(t, sd);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const DiffuseFrame fr = pf.frame(x.x(), x.y());
      if (!fr.valid) continue;
      Vec2 val = Vec2::Zero();
      for (int i = 0; i < tab.n; ++i)
        for (int c = 0; c < 2; ++c) val[c] += coef[u.dof(sd[i], c)] * tab.at[q].value[i];
      const double ut = val.dot(fr.tau);
      acc += fr.grad_norm * geo.area * quad.weights[q] * ut * ut;
    }
  }
  return acc;
}

inline double work_vector(const FunctionSpace& u, const Vec& coef, const QuadratureRule& quad,
                          const std::function<Vec2(double, double)>& f, const ScalarField& weight) {
  BasisTable tab(u.kind, quad);
  double acc = 0.0;
  int sd[6];
  for (int t = 0; t < u.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*u.mesh, t);
    u.scalar_dofs(t, sd);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      Vec2 val = Vec2::Zero();
      for (int i = 0; i < tab.n; ++i)
        for (int c = 0; c < 2; ++c) val[c] += coef[u.dof(sd[i], c)] * tab.at[q].value[i];
      acc += w * geo.area * quad.weights[q] * f(x.x(), x.y()).dot(val);
    }
  }
  return acc;
}

inline double work_scalar(const FunctionSpace& p, const Vec& coef, const QuadratureRule& quad,
                          const ScalarField& f, const ScalarField& weight) {
  BasisTable tab(p.kind, quad);
  double acc = 0.0;
  int sd[6];
  for (int t = 0; t < p.mesh->nt(); ++t) {
    const ElementGeometry geo = geometry(*p.mesh, t);
    p.scalar_dofs(t, sd);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = geo.map(quad.points[q]);
      const double w = weight ? weight(x.x(), x.y()) : 1.0;
      double val = 0.0;
      for (int i = 0; i < tab.n; ++i) val += coef[sd[i]] * tab.at[q].value[i];
      acc += w * geo.area * quad.weights[q] * f(x.x(), x.y()) * val;
    }
  }
  return acc;
}

}  // namespace sddi
