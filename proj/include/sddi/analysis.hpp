#pragma once
// Error measurement and convergence studies.
//
// The headline quantities are the blended total fields
//
//   u_tot = u Phi + q Psi,   q = -kappa grad p,   p_tot = pi Phi + p Psi
//
// compared in relative L2 over the whole domain against the exact fields
// blended with the same phase field, and the modeling-error comparison of a
// diffuse run against the interface-resolving reference on the same parent
// mesh.

#include <chrono>
#include <cmath>
#include <future>
#include <semaphore>
#include <sstream>

#include "sddi/manufactured.hpp"
#include "sddi/sharp.hpp"
#include "sddi/stepper.hpp"

namespace sddi {

struct TotalErrors {
  double e_u = 0.0;  // relative L2 of the total velocity
  double e_p = 0.0;  // relative L2 of the total pressure
};

// Evaluate the discrete total fields of a coupled state at one quadrature
// point of triangle t.  With the unweighted divergence variant the multiplier
// carries theta = pi * Phi, so its contribution to p_tot is theta itself.
struct TotalFieldEval {
  Vec2 u_tot;
  double p_tot;
};

inline TotalFieldEval eval_total_fields(const CoupledSystem& cs, const Vec& x, int t,
                                        const std::array<double, 3>& bary, double phi,
                                        double psi) {
  const Vec uc = cs.velocity_part(x);
  const Vec mc = cs.multiplier_part(x);
  const Vec pc = cs.darcy_part(x);
  const VectorEval ue = eval_vector(cs.velocity, uc, t, bary);
  const ScalarEval me = eval_scalar(cs.multiplier, mc, t, bary);
  const ScalarEval pe = eval_scalar(cs.darcy, pc, t, bary);
  const Vec2 q = -(cs.params.kappa * pe.grad);
  TotalFieldEval out;
  out.u_tot = phi * ue.value + psi * q;
  const double pi_weighted =
      cs.options.div_weighting == DivWeighting::Weighted ? phi * me.value : me.value;
  out.p_tot = pi_weighted + psi * pe.value;
  return out;
}

inline TotalErrors relative_total_errors(const CoupledSystem& cs, const Vec& x,
                                         const ManufacturedCase& mc, double t,
                                         int quad_degree = 6) {
  const QuadratureRule quad = make_quadrature(quad_degree);
  const TriMesh& mesh = *cs.velocity.mesh;
  double du = 0.0, ru = 0.0, dp = 0.0, rp = 0.0;
  for (int tr = 0; tr < mesh.nt(); ++tr) {
    const ElementGeometry geo = geometry(mesh, tr);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 pt = geo.map(quad.points[q]);
      const double phi = cs.phase.phi(pt.x(), pt.y());
      const double psi = 1.0 - phi;
      const TotalFieldEval th = eval_total_fields(cs, x, tr, quad.points[q], phi, psi);
      const Vec2 u_ex = phi * mc.velocity(pt.x(), pt.y(), t) +
                        psi * mc.porous_velocity(pt.x(), pt.y(), t);
      const double p_ex = phi * mc.flow_pressure(pt.x(), pt.y(), t) +
                          psi * mc.porous_pressure(pt.x(), pt.y(), t);
      const double w = geo.area * quad.weights[q];
      du += w * (th.u_tot - u_ex).squaredNorm();
      ru += w * u_ex.squaredNorm();
      dp += w * (th.p_tot - p_ex) * (th.p_tot - p_ex);
      rp += w * p_ex * p_ex;
    }
  }
  require(ru > 0.0 && rp > 0.0, "relative errors: exact field has zero norm");
  return {std::sqrt(du / ru), std::sqrt(dp / rp)};
}

// Weighted seminorms of the difference between two states on the same spaces.
struct WeightedNorms {
  double l2_phi_u = 0.0;    // || u ||_{L2, Phi}
  double dsym_phi_u = 0.0;  // || D(u) ||_{L2, Phi}
  double grad_psi_p = 0.0;  // || kappa^{1/2} grad p ||_{L2, Psi}
};

inline WeightedNorms weighted_difference_norms(const CoupledSystem& cs, const Vec& xa,
                                               const Vec& xb, int quad_degree = 6) {
  const QuadratureRule quad = make_quadrature(quad_degree);
  const Vec du = cs.velocity_part(xa) - cs.velocity_part(xb);
  const Vec dp = cs.darcy_part(xa) - cs.darcy_part(xb);
  const ScalarField phi = cs.phase.phi_field();
  const ScalarField psi = cs.phase.psi_field();
  WeightedNorms out;
  out.l2_phi_u = std::sqrt(weighted_l2_sq_vector(cs.velocity, du, quad, phi));
  out.dsym_phi_u = std::sqrt(0.5 * sym_gradient_sq_vector(cs.velocity, du, quad, phi));
  out.grad_psi_p =
      std::sqrt(kappa_gradient_sq_scalar(cs.darcy, dp, quad, cs.params.kappa, psi));
  return out;
}

// ---------------------------------------------------------------------------
// Sharp-vs-diffuse comparisons.  Submesh triangles keep their parent's vertex
// order, so a barycentric point means the same physical point on both sides.

struct SubdomainDifference {
  double u_abs = 0.0, u_ref = 0.0;  // flow region velocity
  double p_abs = 0.0, p_ref = 0.0;  // porous region pressure
  double u_rel() const { return u_abs / u_ref; }
  double p_rel() const { return p_abs / p_ref; }
};

inline SubdomainDifference sharp_diffuse_difference(const SharpSystem& ss, const Vec& xs,
                                                    const CoupledSystem& cs, const Vec& xd,
                                                    int quad_degree = 6) {
  require(cs.velocity.mesh->nt() >=
              static_cast<int>(ss.split.flow.parent_tri.size() +
                               ss.split.porous.parent_tri.size()),
          "sharp/diffuse comparison: meshes do not match");
  const QuadratureRule quad = make_quadrature(quad_degree);
  const Vec us = ss.velocity_part(xs);
  const Vec ud = cs.velocity_part(xd);
  const Vec ps = ss.pressure_part(xs);
  const Vec pd = cs.darcy_part(xd);
  SubdomainDifference out;
  for (int t = 0; t < ss.split.flow.mesh->nt(); ++t) {
    const int pt = ss.split.flow.parent_tri[t];
    const ElementGeometry geo = geometry(*ss.split.flow.mesh, t);
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 a = eval_vector(ss.velocity, us, t, quad.points[q]).value;
      const Vec2 b = eval_vector(cs.velocity, ud, pt, quad.points[q]).value;
      const double w = geo.area * quad.weights[q];
      out.u_abs += w * (a - b).squaredNorm();
      out.u_ref += w * a.squaredNorm();
    }
  }
  for (int t = 0; t < ss.split.porous.mesh->nt(); ++t) {
    const int pt = ss.split.porous.parent_tri[t];
    const ElementGeometry geo = geometry(*ss.split.porous.mesh, t);
    for (int q = 0; q < quad.size(); ++q) {
      const double a = eval_scalar(ss.pressure, ps, t, quad.points[q]).value;
      const double b = eval_scalar(cs.darcy, pd, pt, quad.points[q]).value;
      const double w = geo.area * quad.weights[q];
      out.p_abs += w * (a - b) * (a - b);
      out.p_ref += w * a * a;
    }
  }
  require(out.u_ref > 0.0 && out.p_ref > 0.0,
          "sharp/diffuse comparison: reference solution is zero");
  out.u_abs = std::sqrt(out.u_abs);
  out.u_ref = std::sqrt(out.u_ref);
  out.p_abs = std::sqrt(out.p_abs);
  out.p_ref = std::sqrt(out.p_ref);
  return out;
}

// Whole-domain relative L2 difference between the diffuse total velocity and
// the reference velocity (u on the flow side, -kappa grad p on the porous
// side).
inline double total_velocity_difference(const SharpSystem& ss, const Vec& xs,
                                        const CoupledSystem& cs, const Vec& xd,
                                        int quad_degree = 6) {
  const QuadratureRule quad = make_quadrature(quad_degree);
  const Vec us = ss.velocity_part(xs);
  const Vec ps = ss.pressure_part(xs);
  double abs = 0.0, ref = 0.0;
  auto accumulate = [&](const SubMesh& sub, bool flow_side) {
    for (int t = 0; t < sub.mesh->nt(); ++t) {
      const int pt = sub.parent_tri[t];
      const ElementGeometry geo = geometry(*sub.mesh, t);
      for (int q = 0; q < quad.size(); ++q) {
        const Vec2 xq = geo.map(quad.points[q]);
        const double phi = cs.phase.phi(xq.x(), xq.y());
        const TotalFieldEval th =
            eval_total_fields(cs, xd, pt, quad.points[q], phi, 1.0 - phi);
        Vec2 reference;
        if (flow_side) {
          reference = eval_vector(ss.velocity, us, t, quad.points[q]).value;
        } else {
          const ScalarEval pe = eval_scalar(ss.pressure, ps, t, quad.points[q]);
          reference = -(ss.params.kappa * pe.grad);
        }
        const double w = geo.area * quad.weights[q];
        abs += w * (th.u_tot - reference).squaredNorm();
        ref += w * reference.squaredNorm();
      }
    }
  };
  accumulate(ss.split.flow, true);
  accumulate(ss.split.porous, false);
  require(ref > 0.0, "total velocity comparison: reference is zero");
  return std::sqrt(abs / ref);
}

// ---------------------------------------------------------------------------
// Convergence sweeps.

struct SweepRow {
  int level = 0;
  double h = 0.0, dt = 0.0, epsilon = 0.0, delta = 0.0;
  double e_u = 0.0, e_p = 0.0;
  double rate_u = std::numeric_limits<double>::quiet_NaN();
  double rate_p = std::numeric_limits<double>::quiet_NaN();
  double runtime_s = 0.0;
};

struct ConvergenceReport {
  std::string kind;     // refinement | epsilon | delta
  std::string scheme;
  std::string profile;
  std::vector<SweepRow> rows;
};

inline void fill_rates(ConvergenceReport& rep) {
  for (size_t i = 1; i < rep.rows.size(); ++i) {
    rep.rows[i].rate_u = std::log2(rep.rows[i - 1].e_u / rep.rows[i].e_u);
    rep.rows[i].rate_p = std::log2(rep.rows[i - 1].e_p / rep.rows[i].e_p);
  }
}

inline void write_report_csv(const ConvergenceReport& rep, std::ostream& out) {
  out << "level,h,dt,epsilon,delta,e_u,rate_u,e_p,rate_p,runtime_s\n";
  out << std::setprecision(17);
  for (const SweepRow& r : rep.rows) {
    out << r.level << "," << r.h << "," << r.dt << "," << r.epsilon << "," << r.delta << ","
        << r.e_u << ",";
    if (std::isfinite(r.rate_u)) out << r.rate_u;
    out << "," << r.e_p << ",";
    if (std::isfinite(r.rate_p)) out << r.rate_p;
    out << "," << r.runtime_s << "\n";
  }
}

inline std::string profile_name(Profile p) {
  switch (p) {
    case Profile::Power: return "power";
    case Profile::Clamp: return "clamp";
    default: return "tanh";
  }
}

// Runs level tasks with a bounded amount of concurrency.  Results are keyed
// by level, so the schedule cannot change the report.
template <typename Task>
inline void run_levels(int levels, int threads, Task&& task) {
  if (threads <= 1) {
    for (int k = 0; k < levels; ++k) task(k);
    return;
  }
  std::counting_semaphore<64> slots(std::min(threads, 64));
  std::vector<std::future<void>> futs;
  futs.reserve(levels);
  for (int k = 0; k < levels; ++k)
    futs.push_back(std::async(std::launch::async, [&task, &slots, k] {
      slots.acquire();
      try {
        task(k);
      } catch (...) {
        slots.release();
        throw;
      }
      slots.release();
    }));
  for (auto& f : futs) f.get();  // rethrows the first failure
}

struct RefinementSweepConfig {
  Scheme scheme = Scheme::BackwardEuler;
  Profile profile = Profile::Tanh;
  double power_alpha = 0.5;
  int levels = 5;
  int n0 = 5;             // coarsest subdivisions: h = 1/n0, halved per level
  double t_end = 1.0;
  double delta0 = 1e-3;
  bool fixed_delta = false;  // default halves delta with h
  PhysicalParams params;
  CoupledOptions options;
  int threads = 1;
};

inline ConvergenceReport run_refinement_sweep(const RefinementSweepConfig& cfg) {
  require(cfg.levels >= 1, "sweep: need at least one level");
  ConvergenceReport rep;
  rep.kind = "refinement";
  rep.scheme = scheme_name(cfg.scheme);
  rep.profile = profile_name(cfg.profile);
  rep.rows.resize(cfg.levels);
  const ManufacturedCase mc = make_manufactured_case(cfg.params);
  const CoupledProblem prob = manufactured_problem(mc);

  run_levels(cfg.levels, cfg.threads, [&](int k) {
    const auto start = std::chrono::steady_clock::now();
    const int n = cfg.n0 << k;
    const double h = 1.0 / n;
    const double delta = cfg.fixed_delta ? cfg.delta0 : cfg.delta0 / (1 << k);
    TriMesh mesh = build_uniform(manufactured_domain(n));
    PhaseField pf = manufactured_phasefield(h, delta, cfg.profile);
    pf.power_alpha = cfg.power_alpha;
    CoupledSystem cs = build_coupled_system(mesh, pf, cfg.params, prob, cfg.options);
    Vec x0 = initial_state(
        cs, [&](double x, double y) { return mc.velocity(x, y, 0.0); },
        [&](double x, double y) { return mc.porous_pressure(x, y, 0.0); },
        [&](double x, double y) { return mc.flow_pressure(x, y, 0.0); });
    RunOptions opt;
    opt.scheme = cfg.scheme;
    opt.grid = {0.0, cfg.t_end, static_cast<int>(std::lround(cfg.t_end / h))};
    opt.with_audit = false;
    RunResult res = run_transient(cs.sys, x0, opt);
    const TotalErrors err = relative_total_errors(cs, res.x, mc, res.t);
    SweepRow& row = rep.rows[k];
    row.level = k;
    row.h = h;
    row.dt = opt.grid.dt();
    row.epsilon = h;
    row.delta = delta;
    row.e_u = err.e_u;
    row.e_p = err.e_p;
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
  });
  fill_rates(rep);
  return rep;
}

struct ModelingSweepConfig {
  Scheme scheme = Scheme::BackwardEuler;
  Profile profile = Profile::Clamp;
  double power_alpha = 0.5;
  int n = 80;              // fixed fine mesh: h = 1/n
  int steps = 80;          // fixed fine time grid
  double t_end = 1.0;
  std::vector<double> epsilons = {0.2, 0.1, 0.05};
  std::vector<double> deltas;                  // explicit per-level floors, else
  std::function<double(double)> delta_of_eps;  // delta_of_eps, default eps^3
  PhysicalParams params;
  CoupledOptions options;
  int threads = 1;
};

// Diffuse runs at several layer widths against one sharp reference run on the
// same parent mesh; errors are the flow-region velocity and porous-region
// pressure differences.
inline ConvergenceReport run_modeling_sweep(const ModelingSweepConfig& cfg) {
  require(!cfg.epsilons.empty(), "sweep: need at least one epsilon");
  require(cfg.deltas.empty() || cfg.deltas.size() == cfg.epsilons.size(),
          "sweep: deltas must match epsilons");
  auto delta_of = cfg.delta_of_eps
                      ? cfg.delta_of_eps
                      : [](double eps) { return eps * eps * eps; };
  ConvergenceReport rep;
  rep.kind = "epsilon";
  rep.scheme = scheme_name(cfg.scheme);
  rep.profile = profile_name(cfg.profile);
  rep.rows.resize(cfg.epsilons.size());

  const ManufacturedCase mc = make_manufactured_case(cfg.params);
  const CoupledProblem prob = manufactured_problem(mc);
  const double h = 1.0 / cfg.n;
  TriMesh mesh = build_uniform(manufactured_domain(cfg.n));

  SharpOptions sopt;
  sopt.velocity_kind = cfg.options.velocity_kind;
  sopt.multiplier_kind = cfg.options.multiplier_kind;
  sopt.darcy_kind = cfg.options.darcy_kind;
  sopt.quad_degree = cfg.options.quad_degree;
  sopt.edge_quad_degree = cfg.options.edge_quad_degree;
  SharpSystem ss = build_sharp_system(split_at_interface(mesh, manufactured_levelset()),
                                      cfg.params, prob, sopt);
  Vec xs0 = sharp_initial_state(
      ss, [&](double x, double y) { return mc.velocity(x, y, 0.0); },
      [&](double x, double y) { return mc.porous_pressure(x, y, 0.0); },
      [&](double x, double y) { return mc.flow_pressure(x, y, 0.0); });
  RunOptions sopt_run;
  sopt_run.scheme = cfg.scheme;
  sopt_run.grid = {0.0, cfg.t_end, cfg.steps};
  sopt_run.with_audit = false;
  const RunResult sharp_res = run_transient(ss.sys, xs0, sopt_run);

  run_levels(static_cast<int>(cfg.epsilons.size()), cfg.threads, [&](int k) {
    const auto start = std::chrono::steady_clock::now();
    const double eps = cfg.epsilons[k];
    const double delta = cfg.deltas.empty() ? delta_of(eps) : cfg.deltas[k];
    PhaseField pf = manufactured_phasefield(eps, delta, cfg.profile);
    pf.power_alpha = cfg.power_alpha;
    CoupledSystem cs = build_coupled_system(mesh, pf, cfg.params, prob, cfg.options);
    Vec x0 = initial_state(
        cs, [&](double x, double y) { return mc.velocity(x, y, 0.0); },
        [&](double x, double y) { return mc.porous_pressure(x, y, 0.0); },
        [&](double x, double y) { return mc.flow_pressure(x, y, 0.0); });
    RunOptions opt;
    opt.scheme = cfg.scheme;
    opt.grid = {0.0, cfg.t_end, cfg.steps};
    opt.with_audit = false;
    RunResult res = run_transient(cs.sys, x0, opt);
    const SubdomainDifference diff = sharp_diffuse_difference(ss, sharp_res.x, cs, res.x);
    SweepRow& row = rep.rows[k];
    row.level = k;
    row.h = h;
    row.dt = cfg.t_end / cfg.steps;
    row.epsilon = eps;
    row.delta = delta;
    row.e_u = diff.u_rel();
    row.e_p = diff.p_rel();
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
  });
  fill_rates(rep);
  return rep;
}

}  // namespace sddi
