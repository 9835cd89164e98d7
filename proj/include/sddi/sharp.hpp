#pragma once
// Interface-resolving reference solver.  The domain is split along a mesh-
// aligned interface into a free-flow submesh and a porous submesh; the
// interface exchange becomes edge integrals over the shared polyline
//
//   + int_G p (v.n)   (momentum row)
//   - int_G q (u.n)   (porous row)
//   + alpha int_G (u.tau)(v.tau)
//
// with n pointing out of the flow region.  Both coupling blocks come from the
// same sample loop, so their antisymmetry is exact, as in the diffuse forms.

#include <memory>

#include "sddi/assemble.hpp"
#include "sddi/coupled.hpp"
#include "sddi/system.hpp"

namespace sddi {

struct SubMesh {
  std::shared_ptr<TriMesh> mesh;
  std::vector<int> parent_tri;     // submesh triangle -> parent triangle
  std::vector<int> parent_vertex;  // submesh vertex -> parent vertex
};

struct SharpSplit {
  SubMesh flow;    // level set positive side
  SubMesh porous;  // level set negative side
};

// Matched interface edge seen from both submeshes; the normal is the flow
// owner's outward normal.  reversed marks opposite traversal on the porous
// side.
struct InterfacePair {
  TaggedEdge flow;
  TaggedEdge porous;
  bool reversed = false;
};

inline SharpSplit split_at_interface(const TriMesh& parent, const LevelSet& ls,
                                     double tol = 1e-9) {
  require(static_cast<bool>(ls.value), "split: level set missing");
  const int nt = parent.nt(), nv = parent.nv();
  std::vector<char> flow_tri(nt);
  for (int t = 0; t < nt; ++t) {
    const Vec2 c = (parent.vertices[parent.triangles[t][0]] +
                    parent.vertices[parent.triangles[t][1]] +
                    parent.vertices[parent.triangles[t][2]]) /
                   3.0;
    flow_tri[t] = ls.value(c.x(), c.y()) > 0.0;
  }
  for (int t = 0; t < nt; ++t)
    for (int v : parent.triangles[t]) {
      const double s = ls.value(parent.vertices[v].x(), parent.vertices[v].y());
      const bool wrong = flow_tri[t] ? s < -tol : s > tol;
      require(!wrong, "split: mesh is not aligned with the interface (triangle " +
                          std::to_string(t) + " straddles the level set)");
    }

  std::map<std::pair<int, int>, std::pair<int, int>> owners;  // edge -> up to 2 triangles
  for (int t = 0; t < nt; ++t)
    for (int m = 0; m < 3; ++m) {
      int a = parent.triangles[t][(m + 1) % 3], b = parent.triangles[t][(m + 2) % 3];
      auto key = std::minmax(a, b);
      auto [it, fresh] = owners.try_emplace({key.first, key.second}, t, -1);
      if (!fresh) it->second.second = t;
    }

  SharpSplit out;
  for (int side = 0; side < 2; ++side) {
    const bool want_flow = side == 0;
    SubMesh& sub = want_flow ? out.flow : out.porous;
    sub.mesh = std::make_shared<TriMesh>();
    std::vector<int> to_sub(nv, -1);
    for (int t = 0; t < nt; ++t) {
      if (flow_tri[t] != want_flow) continue;
      for (int v : parent.triangles[t])
        if (to_sub[v] < 0) {
          to_sub[v] = static_cast<int>(sub.parent_vertex.size());
          sub.parent_vertex.push_back(v);
        }
    }
    // renumber by parent order so the construction is permutation stable
    std::sort(sub.parent_vertex.begin(), sub.parent_vertex.end());
    for (int i = 0; i < static_cast<int>(sub.parent_vertex.size()); ++i)
      to_sub[sub.parent_vertex[i]] = i;
    sub.mesh->vertices.reserve(sub.parent_vertex.size());
    for (int v : sub.parent_vertex) sub.mesh->vertices.push_back(parent.vertices[v]);
    for (int t = 0; t < nt; ++t) {
      if (flow_tri[t] != want_flow) continue;
      sub.parent_tri.push_back(t);
      sub.mesh->triangles.push_back({to_sub[parent.triangles[t][0]],
                                     to_sub[parent.triangles[t][1]],
                                     to_sub[parent.triangles[t][2]]});
    }
    for (const BoundaryEdge& be : parent.boundary) {
      if (to_sub[be.a] < 0 || to_sub[be.b] < 0) continue;
      auto key = std::minmax(be.a, be.b);
      const auto& own = owners.at({key.first, key.second});
      if (flow_tri[own.first] == want_flow)
        sub.mesh->boundary.push_back({to_sub[be.a], to_sub[be.b], be.tag});
    }
    for (const auto& [key, own] : owners) {
      if (own.second < 0 || flow_tri[own.first] == flow_tri[own.second]) continue;
      sub.mesh->boundary.push_back({to_sub[key.first], to_sub[key.second], "interface"});
    }
    require(!sub.mesh->triangles.empty(), "split: one side of the interface is empty");
    audit_mesh(*sub.mesh);
  }
  return out;
}

inline std::vector<InterfacePair> match_interface_edges(const SharpSplit& split) {
  auto flow_edges = collect_tagged_edges(*split.flow.mesh, {"interface"});
  auto porous_edges = collect_tagged_edges(*split.porous.mesh, {"interface"});
  require(flow_edges.size() == porous_edges.size(), "interface: edge count mismatch");
  std::map<std::pair<int, int>, TaggedEdge> porous_by_parent;
  for (const TaggedEdge& e : porous_edges) {
    auto key = std::minmax(split.porous.parent_vertex[e.va], split.porous.parent_vertex[e.vb]);
    porous_by_parent[{key.first, key.second}] = e;
  }
  std::vector<InterfacePair> pairs;
  pairs.reserve(flow_edges.size());
  for (const TaggedEdge& e : flow_edges) {
    const int pa = split.flow.parent_vertex[e.va], pb = split.flow.parent_vertex[e.vb];
    auto key = std::minmax(pa, pb);
    auto it = porous_by_parent.find({key.first, key.second});
    require(it != porous_by_parent.end(), "interface: unmatched edge between submeshes");
    InterfacePair pr;
    pr.flow = e;
    pr.porous = it->second;
    pr.reversed = split.porous.parent_vertex[pr.porous.va] != pa;
    pairs.push_back(pr);
  }
  return pairs;
}

struct SharpInterfaceBlocks {
  SpMat C_up;   // rows velocity, cols porous pressure: +int p (v.n)
  SpMat C_pu;   // exact negative transpose:            -int q (u.n)
  SpMat slip;   // alpha int (u.tau)(v.tau)
};

inline SharpInterfaceBlocks assemble_sharp_interface(const FunctionSpace& u,
                                                     const FunctionSpace& p,
                                                     const std::vector<InterfacePair>& pairs,
                                                     const EdgeQuadratureRule& eq,
                                                     double alpha) {
  require(u.components == 2 && p.components == 1, "interface blocks need vector/scalar spaces");
  std::vector<Triplet> up, pu, sl;
  int sdu[6], sdp[6];
  for (const InterfacePair& pr : pairs) {
    u.scalar_dofs(pr.flow.tri, sdu);
    p.scalar_dofs(pr.porous.tri, sdp);
    const Vec2 n = pr.flow.normal;
    const Vec2 tau(-n.y(), n.x());
    for (size_t q = 0; q < eq.points.size(); ++q) {
      const double s = eq.points[q];
      const BasisEval bu = eval_basis(u.kind, edge_bary(pr.flow, s));
      const BasisEval bp = eval_basis(p.kind, edge_bary(pr.porous, pr.reversed ? 1.0 - s : s));
      const double w = pr.flow.length * eq.weights[q];
      for (int i = 0; i < bu.n; ++i)
        for (int c = 0; c < 2; ++c) {
          const int row = u.dof(sdu[i], c);
          for (int j = 0; j < bp.n; ++j) {
            const double v = w * bu.value[i] * n[c] * bp.value[j];
            up.emplace_back(row, sdp[j], v);
            pu.emplace_back(sdp[j], row, -v);
          }
        }
      if (alpha > 0.0)
        for (int i = 0; i < bu.n; ++i)
          for (int j = 0; j < bu.n; ++j) {
            const double vv = alpha * w * bu.value[i] * bu.value[j];
            for (int c = 0; c < 2; ++c)
              for (int d = 0; d < 2; ++d)
                sl.emplace_back(u.dof(sdu[i], c), u.dof(sdu[j], d), vv * tau[c] * tau[d]);
          }
    }
  }
  SharpInterfaceBlocks out;
  out.C_up.resize(u.dofs(), p.dofs());
  out.C_up.setFromTriplets(up.begin(), up.end());
  out.C_pu.resize(p.dofs(), u.dofs());
  out.C_pu.setFromTriplets(pu.begin(), pu.end());
  out.slip.resize(u.dofs(), u.dofs());
  out.slip.setFromTriplets(sl.begin(), sl.end());
  return out;
}

// int_G (u.tau)^2 over the interface polyline, quadrature route for audits.
inline double interface_tangential_sq(const FunctionSpace& u, const Vec& coef,
                                      const std::vector<InterfacePair>& pairs,
                                      const EdgeQuadratureRule& eq) {
  double acc = 0.0;
  int sd[6];
  for (const InterfacePair& pr : pairs) {
    u.scalar_dofs(pr.flow.tri, sd);
    const Vec2 tau(-pr.flow.normal.y(), pr.flow.normal.x());
    for (size_t q = 0; q < eq.points.size(); ++q) {
      const BasisEval b = eval_basis(u.kind, edge_bary(pr.flow, eq.points[q]));
      Vec2 val = Vec2::Zero();
      for (int i = 0; i < b.n; ++i)
        for (int c = 0; c < 2; ++c) val[c] += coef[u.dof(sd[i], c)] * b.value[i];
      const double ut = val.dot(tau);
      acc += pr.flow.length * eq.weights[q] * ut * ut;
    }
  }
  return acc;
}

struct SharpOptions {
  ElementKind velocity_kind = ElementKind::P2;
  ElementKind multiplier_kind = ElementKind::P1;
  ElementKind darcy_kind = ElementKind::P2;
  int quad_degree = 6;
  int edge_quad_degree = 8;
};

struct SharpSystem {
  SharpSplit split;
  std::vector<InterfacePair> interface;
  FunctionSpace velocity;    // on the flow submesh
  FunctionSpace multiplier;  // on the flow submesh
  FunctionSpace pressure;    // on the porous submesh
  PhysicalParams params;
  SharpOptions options;
  TransientSystem sys;

  Vec velocity_part(const Vec& x) const { return x.segment(sys.layout.off_u(), sys.layout.n_u); }
  Vec multiplier_part(const Vec& x) const {
    return x.segment(sys.layout.off_pi(), sys.layout.n_pi);
  }
  Vec pressure_part(const Vec& x) const { return x.segment(sys.layout.off_p(), sys.layout.n_p); }
};

inline SharpSystem build_sharp_system(SharpSplit split, const PhysicalParams& par,
                                      const CoupledProblem& prob,
                                      const SharpOptions& opt = {}) {
  validate_params(par);
  SharpSystem ss{std::move(split),
                 {},
                 {},
                 {},
                 {},
                 par,
                 opt,
                 {}};
  ss.interface = match_interface_edges(ss.split);
  ss.velocity = make_space(*ss.split.flow.mesh, opt.velocity_kind, 2);
  ss.multiplier = make_space(*ss.split.flow.mesh, opt.multiplier_kind, 1);
  ss.pressure = make_space(*ss.split.porous.mesh, opt.darcy_kind, 1);

  BlockLayout& lay = ss.sys.layout;
  lay.n_u = ss.velocity.dofs();
  lay.n_pi = ss.multiplier.dofs();
  lay.n_p = ss.pressure.dofs();

  const QuadratureRule quad = make_quadrature(opt.quad_degree);
  const EdgeQuadratureRule equad = make_edge_quadrature(opt.edge_quad_degree);

  std::vector<Triplet> mt, kt;
  {
    SpMat Mu = assemble_scalar_mass(ss.velocity, quad, {});
    detail::append_block(mt, Mu, lay.off_u(), lay.off_u(), par.rho);
    SpMat Kv = assemble_stokes_viscous(ss.velocity, quad, par.mu, {});
    detail::append_block(kt, Kv, lay.off_u(), lay.off_u());
    SpMat B = assemble_divergence(ss.velocity, ss.multiplier, quad, {});
    detail::append_block(kt, SpMat(B.transpose()), lay.off_u(), lay.off_pi());
    detail::append_block(kt, B, lay.off_pi(), lay.off_u(), -1.0);
    SpMat Mp = assemble_scalar_mass(ss.pressure, quad, {});
    detail::append_block(mt, Mp, lay.off_p(), lay.off_p(), par.c0);
    DarcyMatrices dm = assemble_darcy(ss.pressure, quad, par.kappa, 1.0, {});
    detail::append_block(kt, dm.stiffness, lay.off_p(), lay.off_p());
    SharpInterfaceBlocks ib =
        assemble_sharp_interface(ss.velocity, ss.pressure, ss.interface, equad, par.alpha_bjs);
    detail::append_block(kt, ib.C_up, lay.off_u(), lay.off_p());
    detail::append_block(kt, ib.C_pu, lay.off_p(), lay.off_u());
    detail::append_block(kt, ib.slip, lay.off_u(), lay.off_u());
  }
  ss.sys.M.resize(lay.total(), lay.total());
  ss.sys.M.setFromTriplets(mt.begin(), mt.end());
  ss.sys.K.resize(lay.total(), lay.total());
  ss.sys.K.setFromTriplets(kt.begin(), kt.end());

  {
    FunctionSpace Vu = ss.velocity, Xp = ss.pressure;
    BlockLayout l = lay;
    TimeVectorField force = prob.force;
    TimeScalarField source = prob.source;
    PhysicalParams pr = par;
    ss.sys.load_volume = [=](double t) {
      Vec out = Vec::Zero(l.total());
      if (force) {
        auto f = [&](double x, double y) { return force(x, y, t); };
        out.segment(l.off_u(), l.n_u) = pr.rho * assemble_vector_load(Vu, quad, f, {});
      }
      if (source) {
        auto g = [&](double x, double y) { return source(x, y, t); };
        out.segment(l.off_p(), l.n_p) = assemble_scalar_load(Xp, quad, g, {});
      }
      return out;
    };
  }
  if (!prob.bc.traction_tags.empty() || !prob.bc.flux_tags.empty()) {
    auto tr_edges = collect_tagged_edges(*ss.split.flow.mesh, prob.bc.traction_tags);
    auto fl_edges = collect_tagged_edges(*ss.split.porous.mesh, prob.bc.flux_tags);
    FunctionSpace Vu = ss.velocity, Xp = ss.pressure;
    BlockLayout l = lay;
    auto traction = prob.bc.traction;
    auto flux = prob.bc.flux;
    ss.sys.load_boundary = [=](double t) {
      Vec out = Vec::Zero(l.total());
      if (!tr_edges.empty()) {
        auto f = [&](double x, double y, const Vec2& n) { return traction(x, y, t, n); };
        out.segment(l.off_u(), l.n_u) = assemble_traction_load(Vu, tr_edges, equad, f, {});
      }
      if (!fl_edges.empty()) {
        auto f = [&](double x, double y, const Vec2& n) { return flux(x, y, t, n); };
        out.segment(l.off_p(), l.n_p) = assemble_flux_load(Xp, fl_edges, equad, f, {});
      }
      return out;
    };
  }
  if (!prob.bc.velocity_tags.empty()) {
    for (int s : boundary_scalar_dofs(ss.velocity, prob.bc.velocity_tags)) {
      const Vec2 xn = ss.velocity.node[s];
      for (int c = 0; c < 2; ++c) {
        auto fn = prob.bc.velocity_value;
        ss.sys.dirichlet.emplace_back(
            lay.off_u() + ss.velocity.dof(s, c),
            [fn, xn, c](double t) { return fn(xn.x(), xn.y(), t)[c]; });
      }
    }
  }
  if (!prob.bc.darcy_tags.empty()) {
    for (int s : boundary_scalar_dofs(ss.pressure, prob.bc.darcy_tags)) {
      const Vec2 xn = ss.pressure.node[s];
      auto fn = prob.bc.darcy_value;
      ss.sys.dirichlet.emplace_back(lay.off_p() + s,
                                    [fn, xn](double t) { return fn(xn.x(), xn.y(), t); });
    }
  }

  {
    FunctionSpace Vu = ss.velocity, Xp = ss.pressure;
    BlockLayout l = lay;
    PhysicalParams pr = par;
    auto pairs = ss.interface;
    TimeVectorField force = prob.force;
    TimeScalarField source = prob.source;
    auto upart = [l](const Vec& x) { return Vec(x.segment(l.off_u(), l.n_u)); };
    auto ppart = [l](const Vec& x) { return Vec(x.segment(l.off_p(), l.n_p)); };
    ss.sys.audit.kinetic = [=](const Vec& x) {
      return 0.5 * pr.rho * weighted_l2_sq_vector(Vu, upart(x), quad, {});
    };
    ss.sys.audit.storage = [=](const Vec& x) {
      return 0.5 * pr.c0 * weighted_l2_sq_scalar(Xp, ppart(x), quad, {});
    };
    ss.sys.audit.viscous = [=](const Vec& x) {
      return pr.mu * sym_gradient_sq_vector(Vu, upart(x), quad, {});
    };
    ss.sys.audit.slip = [=](const Vec& x) {
      if (pr.alpha_bjs == 0.0) return 0.0;
      return pr.alpha_bjs * interface_tangential_sq(Vu, upart(x), pairs, equad);
    };
    ss.sys.audit.seepage = [=](const Vec& x) {
      return kappa_gradient_sq_scalar(Xp, ppart(x), quad, pr.kappa, {});
    };
    ss.sys.audit.work_rate = [=](const Vec& x, double t) {
      double acc = 0.0;
      if (force) {
        auto f = [&](double x0, double y0) { return force(x0, y0, t); };
        acc += pr.rho * work_vector(Vu, upart(x), quad, f, {});
      }
      if (source) {
        auto g = [&](double x0, double y0) { return source(x0, y0, t); };
        acc += work_scalar(Xp, ppart(x), quad, g, {});
      }
      return acc;
    };
  }
  return ss;
}

inline Vec sharp_initial_state(const SharpSystem& ss,
                               const std::function<Vec2(double, double)>& u0,
                               const ScalarField& p0, const ScalarField& pi0 = {}) {
  Vec x = Vec::Zero(ss.sys.layout.total());
  if (u0)
    x.segment(ss.sys.layout.off_u(), ss.sys.layout.n_u) = interpolate_vector(ss.velocity, u0);
  if (pi0)
    x.segment(ss.sys.layout.off_pi(), ss.sys.layout.n_pi) = interpolate(ss.multiplier, pi0);
  if (p0)
    x.segment(ss.sys.layout.off_p(), ss.sys.layout.n_p) = interpolate(ss.pressure, p0);
  return x;
}

// Structured mesh of (0,1) x (-1,1) sheared so one grid line follows
// y = amplitude * sin(waves * pi * x); rows fade linearly to the straight
// top and bottom edges.  ny must be even so the middle row exists.
inline TriMesh build_sheared_interface_mesh(int nx, int ny, double amplitude, int waves) {
  require(nx >= 1 && ny >= 2 && ny % 2 == 0, "sheared mesh: need nx >= 1 and even ny >= 2");
  require(std::abs(amplitude) < 1.0, "sheared mesh: |amplitude| must be below 1");
  TriMesh mesh;
  mesh.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double x = static_cast<double>(i) / nx;
      const double eta = -1.0 + 2.0 * static_cast<double>(j) / ny;
      const double y = eta + amplitude * std::sin(waves * M_PI * x) * (1.0 - std::abs(eta));
      mesh.vertices.emplace_back(x, y);
    }
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1),
                v11 = vid(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  for (int i = 0; i < nx; ++i) {
    mesh.boundary.push_back({vid(i, 0), vid(i + 1, 0), "bottom"});
    mesh.boundary.push_back({vid(i, ny), vid(i + 1, ny), "top"});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary.push_back({vid(0, j), vid(0, j + 1), "left"});
    mesh.boundary.push_back({vid(nx, j), vid(nx, j + 1), "right"});
  }
  audit_mesh(mesh);
  return mesh;
}

}  // namespace sddi
