#pragma once
// Diffuse-interface phase fields.  A level set positive in the fluid region
// is pushed through a monotone profile S with S(+-inf) = +-1:
//
//   phi_raw(x) = (1 + S(levelset(x)/epsilon)) / 2
//   phi(x)     = (1 - 2*delta) * phi_raw(x) + delta        (regularization)
//   psi(x)     = 1 - phi(x)
//
// Profiles: "power" (piecewise (1+-t)^alpha with compact transition, alpha in
// (0,1)), "clamp" (piecewise linear cutoff) and "tanh".  The power and clamp
// profiles are not differentiable at |t| = 1; their slope there is evaluated
// one-sided from outside the layer (zero).  The power slope is unbounded as
// |t| -> 1 from inside, which is inherent to that profile.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sddi/common.hpp"
#include "sddi/expression.hpp"

namespace sddi {

enum class Profile { Power, Clamp, Tanh };

inline Profile profile_from_name(const std::string& name) {
  if (name == "power") return Profile::Power;
  if (name == "clamp") return Profile::Clamp;
  if (name == "tanh") return Profile::Tanh;
  throw std::runtime_error("unknown profile '" + name + "' (power|clamp|tanh)");
}

struct LevelSet {
  ScalarField value;
  std::function<Vec2(double, double)> grad;
  std::string name;
};

// Builds a level set from its config spelling:
//   flat(y0)          ->  y0 - y                      (fluid below y0)
//   sine(a, k, y0)    -> -y + y0 + a*sin(k*pi*x)
//   expression: TEXT  ->  TEXT in the grammar of expression.hpp
inline LevelSet make_levelset(const std::string& descr) {
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  const std::string text = trim(descr);
  auto args_of = [&trim](const std::string& t, size_t open) {
    require(t.back() == ')', "level set: missing ')' in '" + t + "'");
    std::vector<double> args;
    std::string inner = t.substr(open + 1, t.size() - open - 2);
    std::stringstream ss(inner);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      piece = trim(piece);
      try {
        size_t used = 0;
        args.push_back(std::stod(piece, &used));
        require(used == piece.size(), "");
      } catch (const std::exception&) {
        throw std::runtime_error("level set: bad numeric argument '" + piece + "'");
      }
    }
    return args;
  };

  LevelSet ls;
  ls.name = text;
  if (text.rfind("flat(", 0) == 0) {
    auto a = args_of(text, 4);
    require(a.size() == 1, "level set: flat takes one argument");
    const double y0 = a[0];
    ls.value = [y0](double, double y) { return y0 - y; };
    ls.grad = [](double, double) { return Vec2(0.0, -1.0); };
  } else if (text.rfind("sine(", 0) == 0) {
    auto a = args_of(text, 4);
    require(a.size() == 3, "level set: sine takes three arguments (a, k, y0)");
    const double amp = a[0], k = a[1], y0 = a[2];
    ls.value = [amp, k, y0](double x, double y) { return -y + y0 + amp * std::sin(k * M_PI * x); };
    ls.grad = [amp, k](double x, double) {
      return Vec2(amp * k * M_PI * std::cos(k * M_PI * x), -1.0);
    };
  } else if (text.rfind("expression:", 0) == 0) {
    const std::string body = trim(text.substr(std::string("expression:").size()));
    require(!body.empty(), "level set: empty expression");
    Expr::Ptr f = parse_expression(body);
    Expr::Ptr fx = f->diff(0);
    Expr::Ptr fy = f->diff(1);
    ls.value = [f](double x, double y) { return f->eval(x, y); };
    ls.grad = [fx, fy](double x, double y) { return Vec2(fx->eval(x, y), fy->eval(x, y)); };
  } else {
    throw std::runtime_error("unknown level set '" + text + "' (flat(...)|sine(...)|expression: ...)");
  }
  return ls;
}

struct DiffuseFrame {
  bool valid = false;
  Vec2 normal = Vec2::Zero();  // grad(phi)/|grad(phi)|
  Vec2 tau = Vec2::Zero();     // 90-degree rotation, right-handed with normal
  double grad_norm = 0.0;
};

struct PhaseField {
  Profile profile = Profile::Tanh;
  double power_alpha = 0.5;
  double epsilon = 0.1;
  double delta = 1e-3;
  double g_min = 0.0;  // frame validity threshold on |grad(phi)|
  LevelSet levelset;

  double S(double t) const {
    switch (profile) {
      case Profile::Power:
        if (t <= -1.0) return -1.0;
        if (t <= 0.0) return std::pow(t + 1.0, power_alpha) - 1.0;
        if (t <= 1.0) return 1.0 - std::pow(1.0 - t, power_alpha);
        return 1.0;
      case Profile::Clamp:
        return t < -1.0 ? -1.0 : (t > 1.0 ? 1.0 : t);
      case Profile::Tanh:
        return std::tanh(t);
    }
    return 0.0;
  }

  double dS(double t) const {
    switch (profile) {
      case Profile::Power:
        if (t <= -1.0 || t >= 1.0) return 0.0;
        if (t <= 0.0) return power_alpha * std::pow(t + 1.0, power_alpha - 1.0);
        return power_alpha * std::pow(1.0 - t, power_alpha - 1.0);
      case Profile::Clamp:
        return (t <= -1.0 || t >= 1.0) ? 0.0 : 1.0;
      case Profile::Tanh: {
        const double th = std::tanh(t);
        return 1.0 - th * th;
      }
    }
    return 0.0;
  }

  double phi(double x, double y) const {
    const double raw = 0.5 * (1.0 + S(levelset.value(x, y) / epsilon));
    return (1.0 - 2.0 * delta) * raw + delta;
  }

  double psi(double x, double y) const { return 1.0 - phi(x, y); }

  Vec2 grad_phi(double x, double y) const {
    const double slope = dS(levelset.value(x, y) / epsilon) / (2.0 * epsilon);
    return (1.0 - 2.0 * delta) * slope * levelset.grad(x, y);
  }

  DiffuseFrame frame(double x, double y) const {
    DiffuseFrame f;
    const Vec2 g = grad_phi(x, y);
    f.grad_norm = g.norm();
    if (f.grad_norm < g_min || f.grad_norm == 0.0) return f;
    f.valid = true;
    f.normal = g / f.grad_norm;
    f.tau = Vec2(-f.normal.y(), f.normal.x());
    return f;
  }

  ScalarField phi_field() const {
    return [*this](double x, double y) { return phi(x, y); };
  }
  ScalarField psi_field() const {
    return [*this](double x, double y) { return psi(x, y); };
  }
};

inline PhaseField make_phasefield(Profile profile, double epsilon, double delta,
                                  LevelSet levelset, double power_alpha = 0.5,
                                  double g_min = -1.0) {
  require(epsilon > 0.0, "phase field: epsilon must be positive");
  require(delta >= 0.0 && delta < 0.5, "phase field: delta must lie in [0, 1/2)");
  if (profile == Profile::Power)
    require(power_alpha > 0.0 && power_alpha < 1.0, "phase field: power alpha must lie in (0,1)");
  require(static_cast<bool>(levelset.value) && static_cast<bool>(levelset.grad),
          "phase field: level set must provide value and gradient");
  PhaseField pf;
  pf.profile = profile;
  pf.power_alpha = power_alpha;
  pf.epsilon = epsilon;
  pf.delta = delta;
  pf.levelset = std::move(levelset);
  pf.g_min = g_min >= 0.0 ? g_min : 1e-10 / epsilon;
  return pf;
}

}  // namespace sddi
