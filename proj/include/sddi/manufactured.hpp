#pragma once
// Closed-form transient solution on (0,1)x(0,2) with the free-flow region at
// the bottom and the porous region on top of the interface y = 1.  The
// forcing F and source g are derived by inserting the fields into
//
//   rho du/dt = div(2 mu D(u) - pi I) + rho F,   div u = 0
//   c0 dp/dt  = div(kappa grad p) + g
//
// so the fields solve the equations for any parameter values.  The interface
// conditions at y = 1 additionally hold for rho = mu = c0 = alpha_bjs = 1 and
// kappa = I, the parameter set of the convergence benchmark.

#include <numbers>

#include "sddi/coupled.hpp"

namespace sddi {

struct ManufacturedCase {
  PhysicalParams params;
  TimeVectorField velocity;          // u
  TimeScalarField flow_pressure;     // pi
  TimeScalarField porous_pressure;   // p
  TimeVectorField velocity_dt;
  TimeScalarField porous_pressure_dt;
  TimeVectorField force;             // F
  TimeScalarField source;            // g
  TimeVectorField porous_velocity;   // q = -kappa grad p
  std::function<Mat2(double, double, double)> stress;               // sigma(u, pi)
  std::function<Vec2(double, double, double, const Vec2&)> traction;  // sigma n
  std::function<double(double, double, double, const Vec2&)> flux;    // kappa grad p . n
};

inline ManufacturedCase make_manufactured_case(const PhysicalParams& par = {}) {
  validate_params(par);
  constexpr double PI = std::numbers::pi;
  const double e1 = std::exp(1.0);

  ManufacturedCase mc;
  mc.params = par;
  mc.velocity = [=](double x, double y, double t) {
    const double E = std::exp(y), C = std::cos(PI * x), S = std::sin(PI * x);
    const double c = std::cos(2.0 * PI * t);
    return Vec2(-E * S * c / PI, (E - e1) * C * c);
  };
  mc.velocity_dt = [=](double x, double y, double t) {
    const double E = std::exp(y), C = std::cos(PI * x), S = std::sin(PI * x);
    const double s = std::sin(2.0 * PI * t);
    return Vec2(2.0 * E * S * s, -2.0 * PI * (E - e1) * C * s);
  };
  mc.flow_pressure = [=](double x, double y, double t) {
    return 2.0 * std::exp(y) * std::cos(PI * x) * std::cos(2.0 * PI * t);
  };
  mc.porous_pressure = [=](double x, double y, double t) {
    return (std::exp(y) - e1 * y) * std::cos(PI * x) * std::cos(2.0 * PI * t);
  };
  mc.porous_pressure_dt = [=](double x, double y, double t) {
    return -2.0 * PI * (std::exp(y) - e1 * y) * std::cos(PI * x) * std::sin(2.0 * PI * t);
  };
  mc.porous_velocity = [=](double x, double y, double t) {
    const double E = std::exp(y), C = std::cos(PI * x), S = std::sin(PI * x);
    const double c = std::cos(2.0 * PI * t);
    const Vec2 grad(-PI * (E - e1 * y) * S * c, (E - e1) * C * c);
    return Vec2(-(par.kappa * grad));
  };
  mc.force = [=](double x, double y, double t) {
    const double E = std::exp(y), C = std::cos(PI * x), S = std::sin(PI * x);
    const double c = std::cos(2.0 * PI * t), s = std::sin(2.0 * PI * t);
    const double f1 = 2.0 * E * S * s -
                      (par.mu * (PI - 1.0 / PI) + 2.0 * PI) * E * S * c / par.rho;
    const double f2 = -2.0 * PI * (E - e1) * C * s -
                      (par.mu * (E - PI * PI * (E - e1)) - 2.0 * E) * C * c / par.rho;
    return Vec2(f1, f2);
  };
  mc.source = [=](double x, double y, double t) {
    const double E = std::exp(y), C = std::cos(PI * x), S = std::sin(PI * x);
    const double c = std::cos(2.0 * PI * t), s = std::sin(2.0 * PI * t);
    const double pxx = -PI * PI * (E - e1 * y) * C * c;
    const double pxy = -PI * (E - e1) * S * c;
    const double pyy = E * C * c;
    const double div_flux = par.kappa(0, 0) * pxx + 2.0 * par.kappa(0, 1) * pxy +
                            par.kappa(1, 1) * pyy;
    return -2.0 * PI * par.c0 * (E - e1 * y) * C * s - div_flux;
  };
  mc.stress = [=](double x, double y, double t) {
    const double E = std::exp(y), C = std::cos(PI * x), S = std::sin(PI * x);
    const double c = std::cos(2.0 * PI * t);
    Mat2 grad;
    grad << -E * C * c, -E * S * c / PI, -PI * (E - e1) * S * c, E * C * c;
    Mat2 sigma = par.mu * (grad + grad.transpose());
    const double pi_val = 2.0 * E * C * c;
    sigma(0, 0) -= pi_val;
    sigma(1, 1) -= pi_val;
    return sigma;
  };
  mc.traction = [st = mc.stress](double x, double y, double t, const Vec2& n) {
    return Vec2(st(x, y, t) * n);
  };
  mc.flux = [=](double x, double y, double t, const Vec2& n) {
    const double E = std::exp(y), C = std::cos(PI * x), S = std::sin(PI * x);
    const double c = std::cos(2.0 * PI * t);
    const Vec2 grad(-PI * (E - e1 * y) * S * c, (E - e1) * C * c);
    return (par.kappa * grad).dot(n);
  };
  return mc;
}

// Domain, phase field, and boundary assignment of the convergence benchmark.
// The flow region sits above the line y = 1 (the exact fields satisfy the
// slip condition alpha u.tau + sigma n.tau = 0 only with the normal pointing
// downward into the porous region), so the velocity is prescribed on the top
// edge, the porous pressure on the bottom edge, and both fields carry exact
// weighted natural conditions on the lateral edges.
inline RectangleSpec manufactured_domain(int n) {
  RectangleSpec spec;
  spec.x0 = 0.0;
  spec.y0 = 0.0;
  spec.x1 = 1.0;
  spec.y1 = 2.0;
  spec.nx = n;
  spec.ny = 2 * n;
  return spec;
}

// Signed distance to the line y = 1, positive on the flow side above it.
inline LevelSet manufactured_levelset() {
  LevelSet ls;
  ls.value = [](double, double y) { return y - 1.0; };
  ls.grad = [](double, double) { return Vec2(0.0, 1.0); };
  ls.name = "plane(y=1)";
  return ls;
}

inline PhaseField manufactured_phasefield(double epsilon, double delta,
                                          Profile profile = Profile::Tanh) {
  return make_phasefield(profile, epsilon, delta, manufactured_levelset());
}

inline CoupledProblem manufactured_problem(const ManufacturedCase& mc) {
  CoupledProblem prob;
  prob.force = mc.force;
  prob.source = mc.source;
  prob.bc.velocity_tags = {"top"};
  prob.bc.velocity_value = mc.velocity;
  prob.bc.darcy_tags = {"bottom"};
  prob.bc.darcy_value = mc.porous_pressure;
  prob.bc.traction_tags = {"left", "right"};
  prob.bc.traction = mc.traction;
  prob.bc.flux_tags = {"left", "right"};
  prob.bc.flux = mc.flux;
  return prob;
}

}  // namespace sddi
