// Release gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Run without arguments to check everything; pass criterion
// numbers to run a subset while iterating.
//
//   1  backward Euler refinement sweep: fine-level rates and absolute error
//   2  midpoint refinement sweep: second-order rates, monotone errors
//   3  per-step energy identity on randomized data, decay with zero data
//   4  modeling-error sweep against the sharp reference, rate in epsilon
//   5  quadrature and assembly oracles (closed-form values)
//   6  weighted assembly reduces to plain Stokes; renumbering invariance
//   7  sharp-vs-diffuse total velocity improves under (h, epsilon) refinement

#include <sddi/analysis.hpp>
#include <sddi/config.hpp>
#include <sddi/driver.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>

using namespace sddi;

namespace {

struct Checklist {
  bool all_ok = true;
  void line(int id, bool ok, const std::string& what) {
    all_ok = all_ok && ok;
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << what << "\n"
              << std::flush;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void print_report(const ConvergenceReport& rep) {
  for (const SweepRow& r : rep.rows) {
    std::cout << "  level " << r.level << ": h=" << fmt(r.h) << " eps=" << fmt(r.epsilon)
              << " delta=" << fmt(r.delta) << " e_u=" << fmt(r.e_u) << " e_p=" << fmt(r.e_p);
    if (std::isfinite(r.rate_u))
      std::cout << " rate_u=" << fmt(r.rate_u) << " rate_p=" << fmt(r.rate_p);
    std::cout << " (" << fmt(r.runtime_s) << " s)\n";
  }
}

bool errors_monotone(const ConvergenceReport& rep) {
  for (size_t i = 1; i < rep.rows.size(); ++i)
    if (rep.rows[i].e_u >= rep.rows[i - 1].e_u || rep.rows[i].e_p >= rep.rows[i - 1].e_p)
      return false;
  return true;
}

double max_abs(const SpMat& A) {
  double m = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

// --------------------------------------------------------------------------
// 1. Backward Euler refinement sweep, dt = h = eps from 1/5 to 1/80 with the
//    floor delta halving from 1e-3.  The two finest levels must show first
//    order in both errors and the finest velocity error must land within a
//    factor of three of the 8.90e-3 target.

void criterion_backward_euler(Checklist& chk) {
  const auto start = Clock::now();
  RefinementSweepConfig cfg;
  cfg.scheme = Scheme::BackwardEuler;
  cfg.threads = 3;
  const ConvergenceReport rep = run_refinement_sweep(cfg);
  print_report(rep);

  bool rates_ok = true;
  for (size_t i = rep.rows.size() - 2; i < rep.rows.size(); ++i) {
    rates_ok = rates_ok && rep.rows[i].rate_u >= 0.8 && rep.rows[i].rate_u <= 1.3;
    rates_ok = rates_ok && rep.rows[i].rate_p >= 0.8 && rep.rows[i].rate_p <= 1.3;
  }
  const double target = 8.90e-3;
  const double ratio = rep.rows.back().e_u / target;
  const bool abs_ok = ratio <= 3.0 && ratio >= 1.0 / 3.0;
  const double wall = seconds_since(start);
  const bool time_ok = wall <= 900.0;
  chk.line(1, rates_ok && abs_ok && time_ok,
           "backward Euler sweep: fine rates u " + fmt(rep.rows[3].rate_u) + "/" +
               fmt(rep.rows[4].rate_u) + ", p " + fmt(rep.rows[3].rate_p) + "/" +
               fmt(rep.rows[4].rate_p) + " in [0.8,1.3]; e_u(1/80)=" +
               fmt(rep.rows.back().e_u) + " is " + fmt(ratio) + "x the " + fmt(target) +
               " target; " + fmt(wall) + " s");
}

// --------------------------------------------------------------------------
// 2. Same sweep with the midpoint scheme: errors monotone on every level,
//    velocity rates at least 1.3 and pressure rates at least 1.6 on the two
//    finest levels.

void criterion_midpoint(Checklist& chk) {
  const auto start = Clock::now();
  RefinementSweepConfig cfg;
  cfg.scheme = Scheme::Midpoint;
  cfg.threads = 3;
  const ConvergenceReport rep = run_refinement_sweep(cfg);
  print_report(rep);

  const bool monotone = errors_monotone(rep);
  bool rates_ok = true;
  for (size_t i = rep.rows.size() - 2; i < rep.rows.size(); ++i) {
    rates_ok = rates_ok && rep.rows[i].rate_u >= 1.3;
    rates_ok = rates_ok && rep.rows[i].rate_p >= 1.6;
  }
  const double wall = seconds_since(start);
  chk.line(2, monotone && rates_ok,
           "midpoint sweep: fine rates u " + fmt(rep.rows[3].rate_u) + "/" +
               fmt(rep.rows[4].rate_u) + " >= 1.3, p " + fmt(rep.rows[3].rate_p) + "/" +
               fmt(rep.rows[4].rate_p) + " >= 1.6, errors monotone " +
               (monotone ? "yes" : "NO") + "; " + fmt(wall) + " s");
}

// --------------------------------------------------------------------------
// 3. Energy bookkeeping on a randomized configuration (parameters, profile,
//    layer width, floor all drawn fresh each run; the seed is echoed so a
//    failure can be replayed).  Every step of both schemes must close the
//    energy balance to 1e-9 relative, and with zero data and homogeneous
//    boundary values the energy must never increase.

void criterion_energy(Checklist& chk) {
  const auto start = Clock::now();
  const unsigned seed = std::random_device{}();
  std::mt19937 gen(seed);
  auto uniform = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(gen);
  };

  PhysicalParams par;
  par.rho = uniform(0.5, 2.0);
  par.mu = uniform(0.5, 2.0);
  par.c0 = uniform(0.5, 2.0);
  par.alpha_bjs = uniform(0.1, 2.0);
  const double k1 = uniform(0.5, 2.0), k2 = uniform(0.5, 2.0);
  const double k12 = uniform(-0.2, 0.2) * std::sqrt(k1 * k2);
  par.kappa << k1, k12, k12, k2;

  const Profile profiles[] = {Profile::Power, Profile::Clamp, Profile::Tanh};
  const Profile profile = profiles[gen() % 3];
  const double eps = uniform(0.05, 0.2);
  const double delta = std::exp(uniform(std::log(1e-4), std::log(1e-2)));
  std::cout << "  seed=" << seed << " profile=" << profile_name(profile) << " eps=" << fmt(eps)
            << " delta=" << fmt(delta) << " rho=" << fmt(par.rho) << " mu=" << fmt(par.mu)
            << " c0=" << fmt(par.c0) << " alpha=" << fmt(par.alpha_bjs) << "\n";

  TriMesh mesh = build_uniform(manufactured_domain(20));
  PhaseField pf = manufactured_phasefield(eps, delta, profile);
  pf.power_alpha = uniform(0.3, 0.7);

  const ManufacturedCase mc = make_manufactured_case(par);
  CoupledSystem cs = build_coupled_system(mesh, pf, par, manufactured_problem(mc), {});
  const Vec x0 = initial_state(
      cs, [&](double x, double y) { return mc.velocity(x, y, 0.0); },
      [&](double x, double y) { return mc.porous_pressure(x, y, 0.0); },
      [&](double x, double y) { return mc.flow_pressure(x, y, 0.0); });

  bool balance_ok = true;
  for (Scheme scheme : {Scheme::BackwardEuler, Scheme::Midpoint}) {
    RunOptions opt;
    opt.scheme = scheme;
    opt.grid = {0.0, 1.0, 20};
    const RunResult res = run_transient(cs.sys, x0, opt);
    double worst = 0.0;
    for (const StepRecord& r : res.records) worst = std::max(worst, r.balance_residual);
    std::cout << "  " << scheme_name(scheme) << " worst identity residual " << fmt(worst)
              << "\n";
    balance_ok = balance_ok && worst <= 1e-9;
  }

  // Zero data, homogeneous boundary values, random start: decay.
  CoupledProblem hom;
  hom.bc.velocity_tags = {"top"};
  hom.bc.velocity_value = [](double, double, double) { return Vec2::Zero(); };
  hom.bc.darcy_tags = {"bottom"};
  hom.bc.darcy_value = [](double, double, double) { return 0.0; };
  CoupledSystem ch = build_coupled_system(mesh, pf, par, hom, {});
  Vec y0(ch.sys.layout.total());
  for (int i = 0; i < y0.size(); ++i) y0[i] = uniform(-1.0, 1.0);
  for (const auto& [dof, fn] : ch.sys.dirichlet) y0[dof] = 0.0;
  const double e0 = ch.sys.audit.kinetic(y0) + ch.sys.audit.storage(y0);

  bool decay_ok = true;
  for (Scheme scheme : {Scheme::BackwardEuler, Scheme::Midpoint}) {
    RunOptions opt;
    opt.scheme = scheme;
    opt.grid = {0.0, 1.0, 20};
    const RunResult res = run_transient(ch.sys, y0, opt);
    double prev = e0;
    bool monotone = true;
    for (const StepRecord& r : res.records) {
      monotone = monotone && r.energy <= prev * (1.0 + 1e-12) + 1e-14;
      prev = r.energy;
    }
    std::cout << "  " << scheme_name(scheme) << " energy " << fmt(e0) << " -> " << fmt(prev)
              << (monotone ? ", nonincreasing" : ", INCREASED") << "\n";
    decay_ok = decay_ok && monotone;
  }

  chk.line(3, balance_ok && decay_ok,
           std::string("energy identity <= 1e-9 per step (") + (balance_ok ? "yes" : "NO") +
               "), zero-data energy nonincreasing (" + (decay_ok ? "yes" : "NO") + "); " +
               fmt(seconds_since(start)) + " s, seed " + std::to_string(seed));
}

// --------------------------------------------------------------------------
// 4. Modeling error against the sharp solver: fixed fine grid h = dt = 1/80,
//    clamp profile, eps in {1/5, 1/10, 1/20} with delta = eps^3.  The flow
//    velocity difference must shrink monotonically with an overall rate of
//    at least 0.5 per halving.

void criterion_modeling(Checklist& chk) {
  const auto start = Clock::now();
  ModelingSweepConfig cfg;
  cfg.threads = 3;
  const ConvergenceReport rep = run_modeling_sweep(cfg);
  print_report(rep);

  bool monotone = true;
  for (size_t i = 1; i < rep.rows.size(); ++i)
    monotone = monotone && rep.rows[i].e_u < rep.rows[i - 1].e_u;
  const double overall =
      std::log2(rep.rows.front().e_u / rep.rows.back().e_u) /
      static_cast<double>(rep.rows.size() - 1);
  const double wall = seconds_since(start);
  const bool time_ok = wall <= 600.0;
  chk.line(4, monotone && overall >= 0.5 && time_ok,
           "modeling sweep: e_u " + fmt(rep.rows[0].e_u) + " -> " + fmt(rep.rows[2].e_u) +
               " monotone " + (monotone ? "yes" : "NO") + ", rate per halving " +
               fmt(overall) + " (per-step " + fmt(rep.rows[1].rate_u) + ", " +
               fmt(rep.rows[2].rate_u) + ") >= 0.5; " + fmt(wall) + " s");
}

// --------------------------------------------------------------------------
// 5. Closed-form oracles for the quadrature rules and each assembled form.

void criterion_oracles(Checklist& chk) {
  const auto start = Clock::now();
  bool ok = true;
  auto item = [&](bool pass, const std::string& what) {
    ok = ok && pass;
    std::cout << "  " << (pass ? "ok " : "BAD ") << what << "\n";
  };

  // Monomial integrals over the reference triangle: a! b! / (a+b+2)!.
  {
    auto fact = [](int n) {
      double f = 1.0;
      for (int k = 2; k <= n; ++k) f *= k;
      return f;
    };
    double worst = 0.0;
    for (int degree = 1; degree <= 10; ++degree) {
      const QuadratureRule r = make_quadrature(degree);
      for (int a = 0; a <= r.degree; ++a)
        for (int b = 0; a + b <= r.degree; ++b) {
          double s = 0.0;
          for (int q = 0; q < r.size(); ++q)
            s += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b);
          worst = std::max(worst,
                           std::abs(0.5 * s - fact(a) * fact(b) / fact(a + b + 2)));
        }
    }
    item(worst <= 1e-14, "monomial integrals vs factorial formula, defect " + fmt(worst));
  }

  // P1 mass matrix on a single reference triangle: (area/12) [2 1 1; ...].
  {
    TriMesh tri;
    tri.vertices = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
    tri.triangles = {{0, 1, 2}};
    tri.boundary = {{0, 1, "bottom"}, {1, 2, "hyp"}, {2, 0, "left"}};
    audit_mesh(tri);
    const FunctionSpace S = make_space(tri, ElementKind::P1, 1);
    const SpMat M = assemble_scalar_mass(S, make_quadrature(4), {});
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double want = (i == j ? 2.0 : 1.0) / 24.0;
        worst = std::max(worst, std::abs(M.coeff(i, j) - want));
      }
    item(worst <= 1e-14, "P1 reference mass matrix, defect " + fmt(worst));
  }

  TriMesh mesh = build_uniform(manufactured_domain(4));
  const FunctionSpace V = make_space(mesh, ElementKind::P2, 2);
  const FunctionSpace X = make_space(mesh, ElementKind::P2, 1);
  const QuadratureRule quad = make_quadrature(6);

  // Coupling blocks are skew by construction: one shared sample set.
  {
    PhaseField pf =
        make_phasefield(Profile::Tanh, 0.15, 1e-4, make_levelset("sine(0.1, 2, 1.0)"));
    const CouplingMatrices cm = assemble_interface_coupling(V, X, quad, pf);
    const SpMat sum = cm.C_pu + SpMat(cm.C_up.transpose());
    item(sum.norm() == 0.0 && cm.C_pu.norm() > 0.0,
         "interface coupling skewness exact, |C_pu + C_up^T| = " + fmt(sum.norm()));
  }

  // Momentum and porous blocks of the full operator are symmetric.
  {
    const ManufacturedCase mc = make_manufactured_case({});
    PhaseField pf = manufactured_phasefield(0.2, 1e-3, Profile::Tanh);
    CoupledSystem cs = build_coupled_system(mesh, pf, {}, manufactured_problem(mc), {});
    const BlockLayout& l = cs.sys.layout;
    const SpMat A = cs.sys.K.block(l.off_u(), l.off_u(), l.n_u, l.n_u);
    const SpMat D = cs.sys.K.block(l.off_p(), l.off_p(), l.n_p, l.n_p);
    const double da = SpMat(SpMat(A.transpose()) - A).norm() / A.norm();
    const double dd = SpMat(SpMat(D.transpose()) - D).norm() / D.norm();
    item(da <= 1e-13 && dd <= 1e-13,
         "momentum/porous block symmetry, defects " + fmt(da) + ", " + fmt(dd));
  }

  // Rigid motions are in the kernel of the viscous form, weighted or not.
  {
    const Vec rigid =
        interpolate_vector(V, [](double x, double y) { return Vec2(0.3 - 2.0 * y, -1.1 + 2.0 * x); });
    PhaseField pf = manufactured_phasefield(0.2, 1e-3, Profile::Tanh);
    double worst = 0.0;
    for (const ScalarField& w : {ScalarField{}, pf.phi_field()}) {
      const SpMat K = assemble_stokes_viscous(V, quad, 1.7, w);
      worst = std::max(worst, (K * rigid).norm() / (K.norm() * rigid.norm()));
    }
    item(worst <= 1e-10, "rigid motions span the viscous kernel, defect " + fmt(worst));
  }

  // Divergence theorem through the phase field: for the clamp profile with
  // the layer resolved by mesh lines, int e_y . grad phi = -(1 - 2 delta).
  {
    const double delta = 2e-3;
    PhaseField pf = make_phasefield(Profile::Clamp, 0.25, delta, make_levelset("flat(1.0)"));
    const CouplingMatrices cm = assemble_interface_coupling(V, X, make_quadrature(4), pf);
    const Vec u = interpolate_vector(V, [](double, double) { return Vec2(0.0, 1.0); });
    const Vec ones = Vec::Ones(X.dofs());
    const double got = ones.dot(cm.C_pu * u);
    const double defect = std::abs(got + (1.0 - 2.0 * delta));
    item(defect <= 1e-10, "phase-field divergence identity, defect " + fmt(defect));
  }

  const double wall = seconds_since(start);
  chk.line(5, ok && wall < 10.0,
           std::string("quadrature/assembly oracles ") + (ok ? "all hold" : "VIOLATED") +
               "; " + fmt(wall) + " s");
}

// --------------------------------------------------------------------------
// 6. Reduction and renumbering consistency.  A saturated phase field (phi
//    identically one) must reproduce a plain unweighted Stokes operator
//    entrywise, and renumbering the mesh vertices must permute, not change,
//    every operator and leave the reported errors untouched.

void criterion_reduction(Checklist& chk) {
  const auto start = Clock::now();
  bool ok = true;
  auto item = [&](bool pass, const std::string& what) {
    ok = ok && pass;
    std::cout << "  " << (pass ? "ok " : "BAD ") << what << "\n";
  };

  TriMesh mesh = build_uniform(manufactured_domain(4));
  const ManufacturedCase mc = make_manufactured_case({});
  const CoupledProblem prob = manufactured_problem(mc);

  {
    PhysicalParams par;
    par.rho = 0.7;
    par.mu = 1.3;
    PhaseField pf =
        make_phasefield(Profile::Clamp, 0.05, 0.0, make_levelset("flat(100.0)"));
    CoupledOptions opt;
    opt.include_darcy = false;
    CoupledSystem cs = build_coupled_system(mesh, pf, par, prob, opt);

    const FunctionSpace V = make_space(mesh, ElementKind::P2, 2);
    const FunctionSpace Q = make_space(mesh, ElementKind::P1, 1);
    const QuadratureRule quad = make_quadrature(opt.quad_degree);
    const SpMat Ku = assemble_stokes_viscous(V, quad, par.mu, {});
    const SpMat Mu = assemble_scalar_mass(V, quad, {});
    const SpMat B = assemble_divergence(V, Q, quad, {});

    const int n = V.dofs() + Q.dofs();
    std::vector<Triplet> kt, mt;
    detail::append_block(kt, Ku, 0, 0);
    detail::append_block(kt, SpMat(B.transpose()), 0, V.dofs());
    detail::append_block(kt, B, V.dofs(), 0, -1.0);
    detail::append_block(mt, Mu, 0, 0, par.rho);
    SpMat K_ref(n, n), M_ref(n, n);
    K_ref.setFromTriplets(kt.begin(), kt.end());
    M_ref.setFromTriplets(mt.begin(), mt.end());

    const double dk = max_abs(SpMat(cs.sys.K - K_ref));
    const double dm = max_abs(SpMat(cs.sys.M - M_ref));
    item(dk <= 1e-13 * max_abs(K_ref) && dm <= 1e-13 * max_abs(M_ref),
         "saturated phase field equals plain Stokes entrywise, defects " + fmt(dk) + ", " +
             fmt(dm));
  }

  // Renumber the vertices and map dofs back by node position.
  {
    std::mt19937 gen(20240817u);
    std::vector<int> to_new(mesh.nv());
    for (int v = 0; v < mesh.nv(); ++v) to_new[v] = v;
    std::shuffle(to_new.begin(), to_new.end(), gen);
    TriMesh shuffled;
    shuffled.vertices.resize(mesh.nv());
    for (int v = 0; v < mesh.nv(); ++v) shuffled.vertices[to_new[v]] = mesh.vertices[v];
    for (const auto& t : mesh.triangles)
      shuffled.triangles.push_back({to_new[t[0]], to_new[t[1]], to_new[t[2]]});
    for (const BoundaryEdge& e : mesh.boundary)
      shuffled.boundary.push_back({to_new[e.a], to_new[e.b], e.tag});
    audit_mesh(shuffled);

    PhaseField pf = manufactured_phasefield(0.2, 1e-3, Profile::Tanh);
    CoupledSystem c1 = build_coupled_system(mesh, pf, {}, prob, {});
    CoupledSystem c2 = build_coupled_system(shuffled, pf, {}, prob, {});

    auto scalar_map = [](const FunctionSpace& a, const FunctionSpace& b) {
      auto key = [](const Vec2& v) {
        return std::make_pair(v.x() + 0.0, v.y() + 0.0);
      };
      std::map<std::pair<double, double>, int> lookup;
      for (int s = 0; s < b.n_scalar; ++s) lookup[key(b.node[s])] = s;
      std::vector<int> to_b(a.n_scalar);
      for (int s = 0; s < a.n_scalar; ++s) to_b[s] = lookup.at(key(a.node[s]));
      return to_b;
    };
    const std::vector<int> mu = scalar_map(c1.velocity, c2.velocity);
    const std::vector<int> mpi = scalar_map(c1.multiplier, c2.multiplier);
    const std::vector<int> mp = scalar_map(c1.darcy, c2.darcy);

    const BlockLayout& l = c1.sys.layout;
    std::vector<Triplet> pt;
    for (int s = 0; s < c1.velocity.n_scalar; ++s)
      for (int c = 0; c < 2; ++c)
        pt.emplace_back(l.off_u() + c1.velocity.dof(s, c),
                        l.off_u() + c2.velocity.dof(mu[s], c), 1.0);
    for (int s = 0; s < c1.multiplier.n_scalar; ++s)
      pt.emplace_back(l.off_pi() + s, l.off_pi() + mpi[s], 1.0);
    for (int s = 0; s < c1.darcy.n_scalar; ++s)
      pt.emplace_back(l.off_p() + s, l.off_p() + mp[s], 1.0);
    SpMat P(l.total(), l.total());
    P.setFromTriplets(pt.begin(), pt.end());

    const double dk =
        max_abs(SpMat(SpMat(P * c2.sys.K * SpMat(P.transpose())) - c1.sys.K));
    const double dm =
        max_abs(SpMat(SpMat(P * c2.sys.M * SpMat(P.transpose())) - c1.sys.M));
    item(dk <= 1e-13 * max_abs(c1.sys.K) && dm <= 1e-13 * max_abs(c1.sys.M),
         "vertex renumbering permutes the operators, defects " + fmt(dk) + ", " + fmt(dm));

    auto errors = [&](CoupledSystem& cs) {
      const Vec x0 = initial_state(
          cs, [&](double x, double y) { return mc.velocity(x, y, 0.0); },
          [&](double x, double y) { return mc.porous_pressure(x, y, 0.0); },
          [&](double x, double y) { return mc.flow_pressure(x, y, 0.0); });
      RunOptions opt;
      opt.grid = {0.0, 1.0, 5};
      opt.with_audit = false;
      const RunResult res = run_transient(cs.sys, x0, opt);
      return relative_total_errors(cs, res.x, mc, res.t);
    };
    const TotalErrors e1 = errors(c1), e2 = errors(c2);
    const double du = std::abs(e1.e_u - e2.e_u) / e1.e_u;
    const double dp = std::abs(e1.e_p - e2.e_p) / e1.e_p;
    item(du <= 1e-12 && dp <= 1e-12,
         "errors invariant under renumbering, defects " + fmt(du) + ", " + fmt(dp));
  }

  const double wall = seconds_since(start);
  chk.line(6, ok && wall < 30.0,
           std::string("reduction and renumbering consistency ") +
               (ok ? "hold" : "VIOLATED") + "; " + fmt(wall) + " s");
}

// --------------------------------------------------------------------------
// 7. Driven flow over the sine interface on imported aligned meshes: the
//    relative whole-domain difference between the sharp and diffuse total
//    velocities must drop when h and eps are refined together.

void criterion_sine_interface(Checklist& chk) {
  const auto start = Clock::now();
  const RunConfig scfg = parse_config_text("problem = sine_interface_6_2\n");
  const CoupledProblem prob = detail_drv::driven_problem(scfg);
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "sddi_acceptance_meshes";
  std::filesystem::create_directories(dir);

  auto run_level = [&](int n, double eps, double delta) {
    const std::string path = (dir / ("sheared_" + std::to_string(n) + ".mesh")).string();
    export_mesh_file(build_sheared_interface_mesh(n, 2 * n, 0.1, 4), path);
    const TriMesh mesh = import_mesh_file(path);
    const LevelSet ls = make_levelset("sine(0.1, 4, 0)");
    PhaseField pf = make_phasefield(Profile::Clamp, eps, delta, ls);

    CoupledOptions copt;
    copt.velocity_kind = ElementKind::P1Bubble;
    copt.multiplier_kind = ElementKind::P1;
    copt.darcy_kind = ElementKind::P1;
    CoupledSystem cs = build_coupled_system(mesh, pf, scfg.params, prob, copt);

    SharpOptions sopt;
    sopt.velocity_kind = ElementKind::P1Bubble;
    sopt.multiplier_kind = ElementKind::P1;
    sopt.darcy_kind = ElementKind::P1;
    SharpSystem ss = build_sharp_system(split_at_interface(mesh, ls), scfg.params, prob, sopt);

    RunOptions opt;
    opt.grid = {0.0, 0.05, 5};
    opt.with_audit = false;
    const Vec xd = run_transient(cs.sys, Vec::Zero(cs.sys.layout.total()), opt).x;
    const Vec xs = run_transient(ss.sys, Vec::Zero(ss.sys.layout.total()), opt).x;
    const double diff = total_velocity_difference(ss, xs, cs, xd);
    std::cout << "  n=" << n << " eps=" << fmt(eps) << " delta=" << fmt(delta)
              << " relative total velocity difference " << fmt(diff) << "\n";
    return diff;
  };

  const double coarse = run_level(16, 0.1, 1e-3);
  const double fine = run_level(32, 0.05, 5e-4);
  chk.line(7, fine < coarse,
           "sine interface sharp-vs-diffuse difference " + fmt(coarse) + " -> " + fmt(fine) +
               " under (h, eps) refinement; " + fmt(seconds_since(start)) + " s");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto want = [&](int id) { return wanted.empty() || wanted.count(id) > 0; };

  Checklist chk;
  using Criterion = void (*)(Checklist&);
  const Criterion criteria[] = {criterion_backward_euler, criterion_midpoint,
                                criterion_energy,         criterion_modeling,
                                criterion_oracles,        criterion_reduction,
                                criterion_sine_interface};
  for (int id = 1; id <= 7; ++id) {
    if (!want(id)) continue;
    try {
      criteria[id - 1](chk);
    } catch (const std::exception& e) {
      chk.line(id, false, std::string("exception: ") + e.what());
    }
  }
  std::cout << (chk.all_ok ? "all criteria passed" : "FAILURES above") << "\n";
  return chk.all_ok ? 0 : 1;
}
