#pragma once
// Turns a parsed RunConfig into artifacts in an output directory: a manifest
// echoing the resolved configuration, report/diagnostics CSV files, and
// optional VTK snapshots.  Wall times go to the log only, so identical
// configs produce bitwise identical artifacts.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>

#include "sddi/config.hpp"
#include "sddi/vtk.hpp"

namespace sddi {

// Raised when the output directory cannot be created or written (exit 2 at
// the command line, everything else exits 1).
class output_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DriverOptions {
  std::string out_dir = "out";
  int threads = 1;
  bool check_only = false;
  std::ostream* log = nullptr;
};

namespace detail_drv {

inline std::ostream& log_of(const DriverOptions& opt) {
  static std::ofstream null_sink;
  return opt.log ? *opt.log : null_sink;
}

inline TriMesh config_mesh(const RunConfig& cfg) {
  switch (cfg.problem) {
    case ProblemKind::Manufactured: return build_uniform(manufactured_domain(cfg.n));
    case ProblemKind::SineInterface:
      return build_sheared_interface_mesh(cfg.n, 2 * cfg.n, 0.1, 4);
    default: return import_mesh_file(cfg.mesh_file);
  }
}

inline PhaseField config_phasefield(const RunConfig& cfg) {
  PhaseField pf =
      cfg.problem == ProblemKind::Manufactured
          ? manufactured_phasefield(cfg.epsilon, cfg.delta, cfg.profile)
          : make_phasefield(cfg.profile, cfg.epsilon, cfg.delta, make_levelset(cfg.levelset));
  pf.power_alpha = cfg.power_alpha;
  return pf;
}

// Inflow profile shared by every strong velocity tag: a parabola over the
// configured span, clamped to zero outside it, so walls that meet the inflow
// boundary at a span endpoint stay compatible.
inline CoupledProblem driven_problem(const RunConfig& cfg) {
  CoupledProblem prob;
  prob.force = [](double, double, double) { return Vec2::Zero(); };
  prob.source = [](double, double, double) { return 0.0; };
  const double low = cfg.inflow_low, high = cfg.inflow_high, peak = cfg.u_in;
  const double span = high - low;
  prob.bc.velocity_tags.insert(cfg.wall_tags.begin(), cfg.wall_tags.end());
  prob.bc.velocity_tags.insert(cfg.inflow_tag);
  prob.bc.velocity_value = [low, high, peak, span](double, double y, double) {
    const double s = 4.0 * (y - low) * (high - y) / (span * span);
    return Vec2(std::max(0.0, peak * s), 0.0);
  };
  prob.bc.darcy_tags.insert(cfg.pressure_tags.begin(), cfg.pressure_tags.end());
  prob.bc.darcy_value = [](double, double, double) { return 0.0; };
  return prob;
}

inline void check_tags(const TriMesh& mesh, const CoupledBC& bc) {
  std::set<std::string> present;
  for (const BoundaryEdge& e : mesh.boundary) present.insert(e.tag);
  auto verify = [&](const std::set<std::string>& tags) {
    for (const std::string& tag : tags) {
      if (present.count(tag)) continue;
      std::string avail;
      for (const std::string& p : present) avail += (avail.empty() ? "" : ", ") + p;
      throw std::runtime_error("config: boundary tag '" + tag +
                               "' is not present in the mesh (available: " + avail + ")");
    }
  };
  verify(bc.velocity_tags);
  verify(bc.darcy_tags);
}

inline double rel_norm(const SpMat& defect, double scale) {
  return scale > 0.0 ? defect.norm() / scale : defect.norm();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os || !(os << text).flush())
    throw output_error("cannot write '" + path.string() + "'");
}

}  // namespace detail_drv

// Structural audit of the assembled operators; no time stepping.  Each line
// reports the measured defect and its tolerance.
inline void check_invariants(const CoupledSystem& cs, std::ostream& log) {
  const BlockLayout& lay = cs.sys.layout;
  std::vector<std::string> failures;
  auto report = [&](const std::string& name, double value, double tol) {
    log << "[check] " << name << ": " << value << " (tol " << tol << ")\n";
    if (!(value <= tol)) failures.push_back(name);
  };

  auto sym_defect = [&](const SpMat& a) {
    return detail_drv::rel_norm(SpMat(a - SpMat(a.transpose())), a.norm());
  };
  report("mass matrix symmetry", sym_defect(cs.sys.M), 1e-13);
  const SpMat A = cs.sys.K.block(lay.off_u(), lay.off_u(), lay.n_u, lay.n_u);
  report("momentum block symmetry", sym_defect(A), 1e-13);
  if (lay.n_p > 0) {
    const SpMat D = cs.sys.K.block(lay.off_p(), lay.off_p(), lay.n_p, lay.n_p);
    report("porous block symmetry", sym_defect(D), 1e-13);
  }

  const SpMat B_up = cs.sys.K.block(lay.off_u(), lay.off_pi(), lay.n_u, lay.n_pi);
  const SpMat B_pu = cs.sys.K.block(lay.off_pi(), lay.off_u(), lay.n_pi, lay.n_u);
  report("multiplier coupling skewness",
         detail_drv::rel_norm(SpMat(B_up + SpMat(B_pu.transpose())), B_up.norm()), 1e-13);
  if (lay.n_p > 0) {
    const SpMat C_up = cs.sys.K.block(lay.off_u(), lay.off_p(), lay.n_u, lay.n_p);
    const SpMat C_pu = cs.sys.K.block(lay.off_p(), lay.off_u(), lay.n_p, lay.n_u);
    report("porous coupling skewness",
           detail_drv::rel_norm(SpMat(C_up + SpMat(C_pu.transpose())), C_up.norm()), 1e-13);
  }

  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double psd_defect = 0.0;
  const double m_norm = cs.sys.M.norm();
  for (int trial = 0; trial < 5; ++trial) {
    Vec y(cs.sys.M.rows());
    for (int i = 0; i < y.size(); ++i) y[i] = unit(gen);
    const double quad = y.dot(cs.sys.M * y);
    psd_defect = std::max(psd_defect, -quad / (m_norm * y.squaredNorm()));
  }
  report("mass matrix nonnegativity", psd_defect, 1e-14);

  const TriMesh& mesh = *cs.velocity.mesh;
  double range_defect = 0.0;
  const QuadratureRule quad = make_quadrature(4);
  for (int t = 0; t < mesh.nt(); ++t) {
    const ElementGeometry geo = geometry(mesh, t);
    for (size_t q = 0; q < quad.size(); ++q) {
      const Vec2 xq = geo.map(quad.points[q]);
      const double phi = cs.phase.phi(xq.x(), xq.y());
      range_defect = std::max({range_defect, cs.phase.delta - phi, phi - 1.0 + cs.phase.delta});
    }
  }
  report("phase field range", range_defect, 1e-12);

  bool data_ok = true;
  for (const auto& [dof, fn] : cs.sys.dirichlet)
    data_ok = data_ok && std::isfinite(fn(0.0)) && std::isfinite(fn(1.0));
  report("boundary data finiteness", data_ok ? 0.0 : 1.0, 0.5);

  if (!failures.empty()) {
    std::string joined;
    for (const std::string& f : failures) joined += (joined.empty() ? "" : ", ") + f;
    throw std::runtime_error("invariant audit failed: " + joined);
  }
  log << "audit passed\n";
}

namespace detail_drv {

inline void write_report(const std::filesystem::path& out_dir, ConvergenceReport rep) {
  for (SweepRow& row : rep.rows) row.runtime_s = 0.0;
  std::ostringstream os;
  write_report_csv(rep, os);
  write_file(out_dir / "report.csv", os.str());
}

inline void run_solve(const RunConfig& cfg, const DriverOptions& opt,
                      const std::filesystem::path& out_dir, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const TriMesh mesh = config_mesh(cfg);
  const PhaseField pf = config_phasefield(cfg);
  const bool manufactured = cfg.problem == ProblemKind::Manufactured;
  const ManufacturedCase mc = make_manufactured_case(cfg.params);
  const CoupledProblem prob = manufactured ? manufactured_problem(mc) : driven_problem(cfg);
  check_tags(mesh, prob.bc);
  CoupledSystem cs = build_coupled_system(mesh, pf, cfg.params, prob, cfg.options);
  log << "system: " << cs.sys.layout.total() << " dofs on " << mesh.nt() << " triangles\n";
  if (opt.check_only) {
    check_invariants(cs, log);
    return;
  }

  Vec x0 = manufactured
               ? initial_state(
                     cs, [&](double x, double y) { return mc.velocity(x, y, 0.0); },
                     [&](double x, double y) { return mc.porous_pressure(x, y, 0.0); },
                     [&](double x, double y) { return mc.flow_pressure(x, y, 0.0); })
               : Vec(Vec::Zero(cs.sys.layout.total()));
  RunOptions ropt;
  ropt.scheme = cfg.scheme;
  ropt.grid = {0.0, cfg.t_end, cfg.steps};
  ropt.with_audit = cfg.diagnostics;
  std::ofstream diag;
  if (cfg.diagnostics) {
    diag.open(out_dir / "diagnostics.csv");
    if (!diag) throw output_error("cannot write '" + (out_dir / "diagnostics.csv").string() + "'");
    ropt.csv = &diag;
  }
  const RunResult res = run_transient(cs.sys, x0, ropt);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (manufactured) {
    const TotalErrors err = relative_total_errors(cs, res.x, mc, res.t);
    ConvergenceReport rep;
    rep.kind = "solve";
    rep.scheme = scheme_name(cfg.scheme);
    rep.profile = profile_name(cfg.profile);
    SweepRow row;
    row.h = 1.0 / cfg.n;
    row.dt = ropt.grid.dt();
    row.epsilon = cfg.epsilon;
    row.delta = cfg.delta;
    row.e_u = err.e_u;
    row.e_p = err.e_p;
    rep.rows.push_back(row);
    write_report(out_dir, rep);
    log << "errors at t = " << res.t << ": e_u = " << err.e_u << ", e_p = " << err.e_p << "\n";
  }
  if (cfg.snapshot) write_vtk_snapshot_file((out_dir / "solution.vtk").string(), cs, res.x, res.t);
  log << "solve finished in " << elapsed << " s\n";
}

inline void run_refinement(const RunConfig& cfg, const DriverOptions& opt,
                           const std::filesystem::path& out_dir, std::ostream& log) {
  RefinementSweepConfig sweep;
  sweep.scheme = cfg.scheme;
  sweep.profile = cfg.profile;
  sweep.power_alpha = cfg.power_alpha;
  sweep.levels = cfg.levels;
  sweep.n0 = cfg.n;
  sweep.t_end = cfg.t_end;
  sweep.delta0 = cfg.delta;
  sweep.fixed_delta = cfg.fixed_delta;
  sweep.params = cfg.params;
  sweep.options = cfg.options;
  sweep.threads = opt.threads;
  const ConvergenceReport rep = run_refinement_sweep(sweep);
  for (const SweepRow& row : rep.rows)
    log << "level " << row.level << ": h = " << row.h << ", e_u = " << row.e_u
        << ", e_p = " << row.e_p << " (" << row.runtime_s << " s)\n";
  write_report(out_dir, rep);
}

inline void run_modeling(const RunConfig& cfg, const DriverOptions& opt,
                         const std::filesystem::path& out_dir, std::ostream& log) {
  ModelingSweepConfig sweep;
  sweep.scheme = cfg.scheme;
  sweep.profile = cfg.profile;
  sweep.power_alpha = cfg.power_alpha;
  sweep.n = cfg.n;
  sweep.steps = cfg.steps;
  sweep.t_end = cfg.t_end;
  sweep.epsilons = cfg.epsilons;
  sweep.deltas = cfg.deltas;
  sweep.params = cfg.params;
  sweep.options = cfg.options;
  sweep.threads = opt.threads;
  const ConvergenceReport rep = run_modeling_sweep(sweep);
  for (const SweepRow& row : rep.rows)
    log << "epsilon " << row.epsilon << ": e_u = " << row.e_u << ", e_p = " << row.e_p << " ("
        << row.runtime_s << " s)\n";
  write_report(out_dir, rep);
}

}  // namespace detail_drv

inline void execute(const RunConfig& cfg, const DriverOptions& opt) {
  namespace fs = std::filesystem;
  std::ostream& log = detail_drv::log_of(opt);
  const fs::path out_dir(opt.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw output_error("cannot create output directory '" + opt.out_dir + "'");
  const std::string manifest = config_manifest(cfg);
  detail_drv::write_file(out_dir / "manifest.cfg", manifest);
  log << "resolved configuration:\n" << manifest;

  if (opt.check_only || cfg.task == TaskKind::Solve) {
    detail_drv::run_solve(cfg, opt, out_dir, log);
    return;
  }
  if (cfg.task == TaskKind::RefinementSweep)
    detail_drv::run_refinement(cfg, opt, out_dir, log);
  else
    detail_drv::run_modeling(cfg, opt, out_dir, log);
}

}  // namespace sddi
