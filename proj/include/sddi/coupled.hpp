#pragma once
// Builder for the diffuse-interface coupled system.  The free-flow and porous
// fields both live on the whole mesh; the phase field weights every form, and
// the level-set gradient carries the interface exchange terms.
//
// Block structure of the stationary operator (rows test, columns trial):
//
//           u                    pi      p
//   u  [ viscous+slip           B^T     C_up ]
//   pi [ -B                      0       0   ]
//   p  [ C_pu                    0     darcy ]
//
// with C_up = -C_pu^T, which makes the exchange terms energy-neutral.

#include "sddi/assemble.hpp"
#include "sddi/system.hpp"

namespace sddi {

using TimeScalarField = std::function<double(double, double, double)>;
using TimeVectorField = std::function<Vec2(double, double, double)>;

enum class DivWeighting { Weighted, Unweighted };

struct CoupledOptions {
  ElementKind velocity_kind = ElementKind::P2;
  ElementKind multiplier_kind = ElementKind::P1;
  ElementKind darcy_kind = ElementKind::P2;
  DivWeighting div_weighting = DivWeighting::Weighted;
  int quad_degree = 6;
  int edge_quad_degree = 8;
  bool include_darcy = true;  // off reduces the block system to weighted flow only
};

struct CoupledBC {
  std::set<std::string> velocity_tags;  // strong values for both velocity components
  TimeVectorField velocity_value;
  std::set<std::string> darcy_tags;     // strong values for the porous pressure
  TimeScalarField darcy_value;
  std::set<std::string> traction_tags;  // natural: sigma n, tested against phi v
  std::function<Vec2(double, double, double, const Vec2&)> traction;
  std::set<std::string> flux_tags;      // natural: kappa grad p . n, tested against psi q
  std::function<double(double, double, double, const Vec2&)> flux;
};

struct CoupledProblem {
  TimeVectorField force;   // momentum forcing F
  TimeScalarField source;  // porous source g
  CoupledBC bc;
};

struct CoupledSystem {
  FunctionSpace velocity;
  FunctionSpace multiplier;
  FunctionSpace darcy;
  PhaseField phase;
  PhysicalParams params;
  CoupledOptions options;
  TransientSystem sys;

  Vec velocity_part(const Vec& x) const { return x.segment(sys.layout.off_u(), sys.layout.n_u); }
  Vec multiplier_part(const Vec& x) const {
    return x.segment(sys.layout.off_pi(), sys.layout.n_pi);
  }
  Vec darcy_part(const Vec& x) const { return x.segment(sys.layout.off_p(), sys.layout.n_p); }
};

namespace detail {

inline void append_block(std::vector<Triplet>& out, const SpMat& A, int row_off, int col_off,
                         double scale = 1.0) {
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      out.emplace_back(static_cast<int>(it.row()) + row_off,
                       static_cast<int>(it.col()) + col_off, scale * it.value());
}

}  // namespace detail

inline CoupledSystem build_coupled_system(const TriMesh& mesh, const PhaseField& pf,
                                          const PhysicalParams& par,
                                          const CoupledProblem& prob,
                                          const CoupledOptions& opt = {}) {
  validate_params(par);
  CoupledSystem cs{make_space(mesh, opt.velocity_kind, 2),
                   make_space(mesh, opt.multiplier_kind, 1),
                   make_space(mesh, opt.darcy_kind, 1),
                   pf,
                   par,
                   opt,
                   {}};
  BlockLayout& lay = cs.sys.layout;
  lay.n_u = cs.velocity.dofs();
  lay.n_pi = cs.multiplier.dofs();
  lay.n_p = opt.include_darcy ? cs.darcy.dofs() : 0;

  const QuadratureRule quad = make_quadrature(opt.quad_degree);
  const EdgeQuadratureRule equad = make_edge_quadrature(opt.edge_quad_degree);
  const ScalarField phi = pf.phi_field();
  const ScalarField psi = pf.psi_field();

  std::vector<Triplet> mt, kt;
  {
    SpMat Mu = assemble_scalar_mass(cs.velocity, quad, phi);
    detail::append_block(mt, Mu, lay.off_u(), lay.off_u(), par.rho);
    SpMat Kv = assemble_stokes_viscous(cs.velocity, quad, par.mu, phi);
    detail::append_block(kt, Kv, lay.off_u(), lay.off_u());
    if (par.alpha_bjs > 0.0) {
      SpMat Kb = assemble_bjs(cs.velocity, quad, par.alpha_bjs, pf);
      detail::append_block(kt, Kb, lay.off_u(), lay.off_u());
    }
    const ScalarField div_w = opt.div_weighting == DivWeighting::Weighted ? phi : ScalarField{};
    SpMat B = assemble_divergence(cs.velocity, cs.multiplier, quad, div_w);
    detail::append_block(kt, SpMat(B.transpose()), lay.off_u(), lay.off_pi());
    detail::append_block(kt, B, lay.off_pi(), lay.off_u(), -1.0);
  }
  if (opt.include_darcy) {
    SpMat Mp = assemble_scalar_mass(cs.darcy, quad, psi);
    detail::append_block(mt, Mp, lay.off_p(), lay.off_p(), par.c0);
    DarcyMatrices dm = assemble_darcy(cs.darcy, quad, par.kappa, 1.0, psi);
    detail::append_block(kt, dm.stiffness, lay.off_p(), lay.off_p());
    CouplingMatrices cm = assemble_interface_coupling(cs.velocity, cs.darcy, quad, pf);
    detail::append_block(kt, cm.C_pu, lay.off_p(), lay.off_u());
    detail::append_block(kt, cm.C_up, lay.off_u(), lay.off_p());
  }
  cs.sys.M.resize(lay.total(), lay.total());
  cs.sys.M.setFromTriplets(mt.begin(), mt.end());
  cs.sys.K.resize(lay.total(), lay.total());
  cs.sys.K.setFromTriplets(kt.begin(), kt.end());

  // Loads are reassembled per step; data functions may depend on time.
  {
    FunctionSpace Vu = cs.velocity, Xp = cs.darcy;
    BlockLayout l = lay;
    TimeVectorField force = prob.force;
    TimeScalarField source = prob.source;
    PhysicalParams pr = par;
    bool darcy = opt.include_darcy;
    cs.sys.load_volume = [=](double t) {
      Vec out = Vec::Zero(l.total());
      if (force) {
        auto f = [&](double x, double y) { return force(x, y, t); };
        out.segment(l.off_u(), l.n_u) = pr.rho * assemble_vector_load(Vu, quad, f, phi);
      }
      if (darcy && source) {
        auto g = [&](double x, double y) { return source(x, y, t); };
        out.segment(l.off_p(), l.n_p) = assemble_scalar_load(Xp, quad, g, psi);
      }
      return out;
    };
  }
  if (!prob.bc.traction_tags.empty() || !prob.bc.flux_tags.empty()) {
    require(prob.bc.traction_tags.empty() || static_cast<bool>(prob.bc.traction),
            "coupled system: traction tags given without traction data");
    require(prob.bc.flux_tags.empty() || static_cast<bool>(prob.bc.flux),
            "coupled system: flux tags given without flux data");
    auto tr_edges = collect_tagged_edges(mesh, prob.bc.traction_tags);
    auto fl_edges = collect_tagged_edges(mesh, prob.bc.flux_tags);
    FunctionSpace Vu = cs.velocity, Xp = cs.darcy;
    BlockLayout l = lay;
    auto traction = prob.bc.traction;
    auto flux = prob.bc.flux;
    bool darcy = opt.include_darcy;
    cs.sys.load_boundary = [=](double t) {
      Vec out = Vec::Zero(l.total());
      if (!tr_edges.empty()) {
        auto f = [&](double x, double y, const Vec2& n) { return traction(x, y, t, n); };
        out.segment(l.off_u(), l.n_u) = assemble_traction_load(Vu, tr_edges, equad, f, phi);
      }
      if (darcy && !fl_edges.empty()) {
        auto f = [&](double x, double y, const Vec2& n) { return flux(x, y, t, n); };
        out.segment(l.off_p(), l.n_p) = assemble_flux_load(Xp, fl_edges, equad, f, psi);
      }
      return out;
    };
  }

  if (!prob.bc.velocity_tags.empty()) {
    require(static_cast<bool>(prob.bc.velocity_value),
            "coupled system: velocity tags given without boundary values");
    for (int s : boundary_scalar_dofs(cs.velocity, prob.bc.velocity_tags)) {
      const Vec2 xn = cs.velocity.node[s];
      for (int c = 0; c < 2; ++c) {
        auto fn = prob.bc.velocity_value;
        cs.sys.dirichlet.emplace_back(
            lay.off_u() + cs.velocity.dof(s, c),
            [fn, xn, c](double t) { return fn(xn.x(), xn.y(), t)[c]; });
      }
    }
  }
  if (opt.include_darcy && !prob.bc.darcy_tags.empty()) {
    require(static_cast<bool>(prob.bc.darcy_value),
            "coupled system: porous pressure tags given without boundary values");
    for (int s : boundary_scalar_dofs(cs.darcy, prob.bc.darcy_tags)) {
      const Vec2 xn = cs.darcy.node[s];
      auto fn = prob.bc.darcy_value;
      cs.sys.dirichlet.emplace_back(lay.off_p() + s,
                                    [fn, xn](double t) { return fn(xn.x(), xn.y(), t); });
    }
  }

  {
    FunctionSpace Vu = cs.velocity, Xp = cs.darcy;
    BlockLayout l = lay;
    PhysicalParams pr = par;
    PhaseField field = pf;
    TimeVectorField force = prob.force;
    TimeScalarField source = prob.source;
    bool darcy = opt.include_darcy;
    auto upart = [l](const Vec& x) { return Vec(x.segment(l.off_u(), l.n_u)); };
    auto ppart = [l](const Vec& x) { return Vec(x.segment(l.off_p(), l.n_p)); };
    cs.sys.audit.kinetic = [=](const Vec& x) {
      return 0.5 * pr.rho * weighted_l2_sq_vector(Vu, upart(x), quad, phi);
    };
    cs.sys.audit.storage = [=](const Vec& x) {
      if (!darcy) return 0.0;
      return 0.5 * pr.c0 * weighted_l2_sq_scalar(Xp, ppart(x), quad, psi);
    };
    cs.sys.audit.viscous = [=](const Vec& x) {
      return pr.mu * sym_gradient_sq_vector(Vu, upart(x), quad, phi);
    };
    cs.sys.audit.slip = [=](const Vec& x) {
      if (pr.alpha_bjs == 0.0) return 0.0;
      return pr.alpha_bjs * tangential_sq_vector(Vu, upart(x), quad, field);
    };
    cs.sys.audit.seepage = [=](const Vec& x) {
      if (!darcy) return 0.0;
      return kappa_gradient_sq_scalar(Xp, ppart(x), quad, pr.kappa, psi);
    };
    cs.sys.audit.work_rate = [=](const Vec& x, double t) {
      double acc = 0.0;
      if (force) {
        auto f = [&](double x0, double y0) { return force(x0, y0, t); };
        acc += pr.rho * work_vector(Vu, upart(x), quad, f, phi);
      }
      if (darcy && source) {
        auto g = [&](double x0, double y0) { return source(x0, y0, t); };
        acc += work_scalar(Xp, ppart(x), quad, g, psi);
      }
      return acc;
    };
  }
  return cs;
}

// Nodal initial state; the multiplier starts at the supplied field or zero.
inline Vec initial_state(const CoupledSystem& cs,
                         const std::function<Vec2(double, double)>& u0,
                         const ScalarField& p0, const ScalarField& pi0 = {}) {
  Vec x = Vec::Zero(cs.sys.layout.total());
  if (u0)
    x.segment(cs.sys.layout.off_u(), cs.sys.layout.n_u) = interpolate_vector(cs.velocity, u0);
  if (pi0)
    x.segment(cs.sys.layout.off_pi(), cs.sys.layout.n_pi) = interpolate(cs.multiplier, pi0);
  if (cs.sys.layout.n_p > 0 && p0)
    x.segment(cs.sys.layout.off_p(), cs.sys.layout.n_p) = interpolate(cs.darcy, p0);
  return x;
}

}  // namespace sddi
