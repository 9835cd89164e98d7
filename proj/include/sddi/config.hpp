#pragma once
// Text run configuration for the command line driver.  A config is a flat
// list of `key = value` lines; '#' starts a comment.  The required `problem`
// key selects a preset that supplies defaults for everything left unset, and
// the resolved configuration serializes back out as a manifest, which is
// itself a valid config file reproducing the run.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sddi/analysis.hpp"

namespace sddi {

enum class ProblemKind { Manufactured, SineInterface, Custom };
enum class TaskKind { Solve, RefinementSweep, ModelingSweep };

inline const char* problem_name(ProblemKind p) {
  switch (p) {
    case ProblemKind::Manufactured: return "manufactured_6_1";
    case ProblemKind::SineInterface: return "sine_interface_6_2";
    default: return "custom";
  }
}

inline const char* task_name(TaskKind t) {
  switch (t) {
    case TaskKind::Solve: return "solve";
    case TaskKind::RefinementSweep: return "refinement_sweep";
    default: return "modeling_sweep";
  }
}

struct RunConfig {
  ProblemKind problem = ProblemKind::Manufactured;
  TaskKind task = TaskKind::Solve;
  Scheme scheme = Scheme::BackwardEuler;
  Profile profile = Profile::Tanh;
  double power_alpha = 0.5;

  int n = 5;  // subdivisions of the unit edge; unused for imported meshes
  double epsilon = 0.2;
  double delta = 1e-3;
  double t_end = 1.0;
  int steps = 5;

  PhysicalParams params;
  CoupledOptions options;

  // refinement sweep
  int levels = 5;
  bool fixed_delta = false;

  // modeling sweep
  std::vector<double> epsilons;
  std::vector<double> deltas;

  // driven flow (sine preset and custom meshes)
  double u_in = 0.0;
  std::string mesh_file;
  std::string levelset;
  std::string inflow_tag = "left";
  double inflow_low = -1.0, inflow_high = 0.0;
  std::vector<std::string> wall_tags{"bottom"};
  std::vector<std::string> pressure_tags{"top"};

  bool diagnostics = true;
  bool snapshot = false;
};

namespace detail_cfg {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Shortest text that parses back to the same double, so a manifest round-trips.
inline std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string join(const std::vector<double>& vs) {
  std::string out;
  for (size_t i = 0; i < vs.size(); ++i) out += (i ? ", " : "") + fmt(vs[i]);
  return out;
}

inline std::string join(const std::vector<std::string>& vs) {
  std::string out;
  for (size_t i = 0; i < vs.size(); ++i) out += (i ? ", " : "") + vs[i];
  return out;
}

struct KeyValues {
  std::map<std::string, std::string> kv;

  static KeyValues read(std::istream& in) {
    KeyValues out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      require(eq != std::string::npos && eq > 0,
              "config: line " + std::to_string(lineno) + " is not 'key = value': '" + line + "'");
      const std::string key = trim(line.substr(0, eq));
      require(!out.kv.count(key), "config: duplicate key '" + key + "'");
      out.kv[key] = trim(line.substr(eq + 1));
    }
    return out;
  }

  bool has(const std::string& key) const { return kv.count(key) > 0; }

  std::string take(const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::string v = it->second;
    kv.erase(it);
    return v;
  }

  static double parse_number(const std::string& key, const std::string& text) {
    try {
      size_t used = 0;
      const double v = std::stod(text, &used);
      require(used == text.size() && std::isfinite(v), "");
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("config: key '" + key + "' expects a number, got '" + text + "'");
    }
  }

  double number(const std::string& key, double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string text = it->second;
    kv.erase(it);
    return parse_number(key, text);
  }

  int integer(const std::string& key, int fallback) {
    const double v = number(key, fallback);
    require(v == std::floor(v) && std::abs(v) < 1e9,
            "config: key '" + key + "' expects an integer, got " + fmt(v));
    return static_cast<int>(v);
  }

  bool flag(const std::string& key, bool fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string v = it->second;
    kv.erase(it);
    if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
    if (v == "off" || v == "false" || v == "no" || v == "0") return false;
    throw std::runtime_error("config: key '" + key + "' expects on/off, got '" + v + "'");
  }

  std::vector<std::string> pieces(const std::string& key, std::vector<std::string> fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::stringstream ss(it->second);
    kv.erase(it);
    std::vector<std::string> out;
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      piece = trim(piece);
      require(!piece.empty(), "config: key '" + key + "' has an empty list entry");
      out.push_back(piece);
    }
    return out;
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const std::string& piece : pieces(key, {})) out.push_back(parse_number(key, piece));
    return out;
  }
};

// Keys that are valid only in part of the (problem, task) grid; anything not
// listed here and not consumed by the parser is simply unknown.
inline const std::map<std::string, std::string>& key_scopes() {
  static const std::map<std::string, std::string> scopes = {
      {"levels", "task=refinement_sweep"},
      {"fixed_delta", "task=refinement_sweep"},
      {"epsilons", "task=modeling_sweep"},
      {"deltas", "task=modeling_sweep"},
      {"epsilon", "task=solve"},
      {"delta", "task=solve or task=refinement_sweep"},
      {"dt", "task=solve or task=modeling_sweep"},
      {"steps", "task=solve or task=modeling_sweep"},
      {"diagnostics", "task=solve"},
      {"snapshot", "task=solve"},
      {"n", "problems with generated meshes"},
      {"u_in", "problem=sine_interface_6_2 or problem=custom"},
      {"levelset", "problem=sine_interface_6_2 or problem=custom"},
      {"inflow_tag", "problem=sine_interface_6_2 or problem=custom"},
      {"inflow_span", "problem=sine_interface_6_2 or problem=custom"},
      {"wall_tags", "problem=sine_interface_6_2 or problem=custom"},
      {"pressure_tags", "problem=sine_interface_6_2 or problem=custom"},
      {"mesh_file", "problem=custom"},
  };
  return scopes;
}

inline void reject_leftovers(const KeyValues& kvs) {
  if (kvs.kv.empty()) return;
  const std::string& key = kvs.kv.begin()->first;
  const auto it = key_scopes().find(key);
  if (it != key_scopes().end())
    throw std::runtime_error("config: key '" + key + "' only applies to " + it->second);
  throw std::runtime_error("config: unknown key '" + key + "'");
}

inline ElementKind element(const std::string& key, const std::string& name) {
  if (name == "p1") return ElementKind::P1;
  if (name == "p2") return ElementKind::P2;
  if (name == "p1b" || name == "mini") return ElementKind::P1Bubble;
  throw std::runtime_error("config: key '" + key + "' expects p1, p2, or p1b, got '" + name +
                           "'");
}

inline const char* element_name(ElementKind k) {
  switch (k) {
    case ElementKind::P1: return "p1";
    case ElementKind::P2: return "p2";
    default: return "p1b";
  }
}

}  // namespace detail_cfg

inline RunConfig parse_config_stream(std::istream& in) {
  using detail_cfg::fmt;
  detail_cfg::KeyValues kvs = detail_cfg::KeyValues::read(in);
  RunConfig cfg;

  require(kvs.has("problem"), "config: missing required key 'problem'");
  const std::string prob = kvs.take("problem", "");
  if (prob == "manufactured_6_1") cfg.problem = ProblemKind::Manufactured;
  else if (prob == "sine_interface_6_2") cfg.problem = ProblemKind::SineInterface;
  else if (prob == "custom") cfg.problem = ProblemKind::Custom;
  else
    throw std::runtime_error(
        "config: key 'problem' expects manufactured_6_1, sine_interface_6_2, or custom, got '" +
        prob + "'");

  const std::string task = kvs.take("task", "solve");
  if (task == "solve") cfg.task = TaskKind::Solve;
  else if (task == "refinement_sweep") cfg.task = TaskKind::RefinementSweep;
  else if (task == "modeling_sweep") cfg.task = TaskKind::ModelingSweep;
  else
    throw std::runtime_error(
        "config: key 'task' expects solve, refinement_sweep, or modeling_sweep, got '" + task +
        "'");
  require(cfg.task == TaskKind::Solve || cfg.problem == ProblemKind::Manufactured,
          "config: task=" + std::string(task_name(cfg.task)) +
              " requires problem=manufactured_6_1 (sweeps compare against the exact solution)");

  const std::string scheme = kvs.take("scheme", "backward_euler");
  try {
    cfg.scheme = scheme_from_name(scheme);
  } catch (const std::exception&) {
    throw std::runtime_error("config: key 'scheme' expects backward_euler or midpoint, got '" +
                             scheme + "'");
  }

  const std::string mode = kvs.take("mode", "weighted");
  if (mode == "weighted") cfg.options.div_weighting = DivWeighting::Weighted;
  else if (mode == "unweighted") cfg.options.div_weighting = DivWeighting::Unweighted;
  else
    throw std::runtime_error("config: key 'mode' expects weighted or unweighted, got '" + mode +
                             "'");

  const bool modeling = cfg.task == TaskKind::ModelingSweep;
  const std::string profile = kvs.take("profile", modeling ? "clamp" : "tanh");
  try {
    cfg.profile = profile_from_name(profile);
  } catch (const std::exception&) {
    throw std::runtime_error("config: key 'profile' expects power, clamp, or tanh, got '" +
                             profile + "'");
  }
  cfg.power_alpha = kvs.number("power_alpha", 0.5);
  require(cfg.power_alpha > 0.0 && cfg.power_alpha < 1.0,
          "config: power_alpha must lie in (0, 1), got " + fmt(cfg.power_alpha));

  const bool sine = cfg.problem == ProblemKind::SineInterface;
  cfg.params.rho = kvs.number("rho", 1.0);
  cfg.params.mu = kvs.number("mu", sine ? 0.035 : 1.0);
  cfg.params.c0 = kvs.number("c0", sine ? 1e-3 : 1.0);
  cfg.params.alpha_bjs = kvs.number("alpha_bjs", sine ? 1e3 : 1.0);
  const double kappa = kvs.number("kappa", sine ? 1e-5 : 1.0);
  require(cfg.params.rho > 0.0, "config: rho must be positive, got " + fmt(cfg.params.rho));
  require(cfg.params.mu > 0.0, "config: mu must be positive, got " + fmt(cfg.params.mu));
  require(cfg.params.c0 > 0.0, "config: c0 must be positive, got " + fmt(cfg.params.c0));
  require(cfg.params.alpha_bjs >= 0.0,
          "config: alpha_bjs must be nonnegative, got " + fmt(cfg.params.alpha_bjs));
  require(kappa > 0.0, "config: kappa must be positive, got " + fmt(kappa));
  cfg.params.kappa = kappa * Mat2::Identity();

  const bool driven = cfg.problem != ProblemKind::Manufactured;
  cfg.options.velocity_kind =
      detail_cfg::element("velocity_element", kvs.take("velocity_element", driven ? "p1b" : "p2"));
  require(cfg.options.velocity_kind != ElementKind::P1,
          "config: velocity_element must be p2 or p1b (plain p1 is not inf-sup stable)");
  cfg.options.multiplier_kind =
      detail_cfg::element("multiplier_element", kvs.take("multiplier_element", "p1"));
  require(cfg.options.multiplier_kind == ElementKind::P1,
          "config: multiplier_element must be p1");
  cfg.options.darcy_kind =
      detail_cfg::element("darcy_element", kvs.take("darcy_element", driven ? "p1" : "p2"));
  require(cfg.options.darcy_kind != ElementKind::P1Bubble,
          "config: darcy_element must be p1 or p2");
  cfg.options.quad_degree = kvs.integer("quad_degree", 6);
  require(cfg.options.quad_degree >= 2 && cfg.options.quad_degree <= 10,
          "config: quad_degree must lie in [2, 10]");
  cfg.options.edge_quad_degree = kvs.integer("edge_quad_degree", 8);
  require(cfg.options.edge_quad_degree >= 2 && cfg.options.edge_quad_degree <= 21,
          "config: edge_quad_degree must lie in [2, 21]");

  if (cfg.problem == ProblemKind::Custom) {
    require(!kvs.has("n"),
            "config: key 'n' does not apply to problem=custom (resolution comes from mesh_file)");
    require(kvs.has("mesh_file"), "config: missing required key 'mesh_file'");
    cfg.mesh_file = kvs.take("mesh_file", "");
    require(std::filesystem::exists(cfg.mesh_file),
            "config: mesh_file '" + cfg.mesh_file + "' does not exist");
    require(kvs.has("levelset"), "config: missing required key 'levelset'");
  } else {
    const int def_n = cfg.problem == ProblemKind::Manufactured ? (modeling ? 80 : 5) : 20;
    cfg.n = kvs.integer("n", def_n);
    require(cfg.n >= 1 && cfg.n <= 4096, "config: n must lie in [1, 4096]");
  }

  cfg.t_end = kvs.number("t_end", sine ? 3.0 : 1.0);
  require(cfg.t_end > 0.0, "config: t_end must be positive, got " + fmt(cfg.t_end));
  if (cfg.task != TaskKind::RefinementSweep) {
    require(!(kvs.has("dt") && kvs.has("steps")), "config: set either dt or steps, not both");
    if (kvs.has("steps")) {
      cfg.steps = kvs.integer("steps", 0);
    } else {
      double dt = kvs.number("dt", 0.0);
      if (dt == 0.0) {
        if (cfg.problem == ProblemKind::Manufactured)
          cfg.steps = modeling ? 80 : static_cast<int>(std::lround(cfg.t_end * cfg.n));
        else
          dt = 1e-2;
      }
      if (dt != 0.0) {
        require(dt > 0.0, "config: dt must be positive, got " + fmt(dt));
        const double ratio = cfg.t_end / dt;
        cfg.steps = static_cast<int>(std::lround(ratio));
        require(std::abs(ratio - cfg.steps) <= 1e-6 * std::max(1.0, ratio),
                "config: dt must divide t_end evenly");
      }
    }
    require(cfg.steps >= 1, "config: steps must be positive, got " + fmt(cfg.steps));
  }

  cfg.delta = kvs.number("delta", 1e-3);
  require(cfg.delta > 0.0 && cfg.delta < 0.5,
          "config: delta must lie in (0, 1/2), got " + fmt(cfg.delta));
  if (cfg.task == TaskKind::Solve) {
    cfg.epsilon =
        kvs.number("epsilon", cfg.problem == ProblemKind::Manufactured ? 1.0 / cfg.n : 0.05);
    require(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0,
            "config: epsilon must lie in (0, 1], got " + fmt(cfg.epsilon));
  }

  if (cfg.task == TaskKind::RefinementSweep) {
    cfg.levels = kvs.integer("levels", 5);
    require(cfg.levels >= 1 && cfg.levels <= 8, "config: levels must lie in [1, 8]");
    cfg.fixed_delta = kvs.flag("fixed_delta", false);
  }
  if (modeling) {
    cfg.epsilons = kvs.numbers("epsilons", {0.2, 0.1, 0.05});
    require(!cfg.epsilons.empty(), "config: epsilons must list at least one value");
    for (size_t i = 0; i < cfg.epsilons.size(); ++i) {
      require(cfg.epsilons[i] > 0.0 && cfg.epsilons[i] <= 1.0,
              "config: epsilons entries must lie in (0, 1]");
      require(i == 0 || cfg.epsilons[i] < cfg.epsilons[i - 1],
              "config: epsilons must decrease strictly");
    }
    cfg.deltas = kvs.numbers("deltas", {});
    if (cfg.deltas.empty())
      for (const double eps : cfg.epsilons) cfg.deltas.push_back(eps * eps * eps);
    require(cfg.deltas.size() == cfg.epsilons.size(),
            "config: deltas must list one value per epsilon");
    for (const double d : cfg.deltas)
      require(d > 0.0 && d < 0.5, "config: deltas entries must lie in (0, 1/2)");
  }

  if (driven) {
    cfg.u_in = kvs.number("u_in", sine ? 10.0 : 0.0);
    cfg.levelset = kvs.take("levelset", sine ? "sine(0.1, 4, 0)" : "");
    try {
      make_levelset(cfg.levelset);
    } catch (const std::exception& e) {
      throw std::runtime_error("config: key 'levelset': " + std::string(e.what()));
    }
    cfg.inflow_tag = kvs.take("inflow_tag", "left");
    require(!cfg.inflow_tag.empty(), "config: inflow_tag must not be empty");
    const std::vector<double> span = kvs.numbers("inflow_span", {-1.0, 0.0});
    require(span.size() == 2 && span[0] < span[1],
            "config: inflow_span expects 'low, high' with low < high");
    cfg.inflow_low = span[0];
    cfg.inflow_high = span[1];
    cfg.wall_tags = kvs.pieces("wall_tags", {"bottom"});
    cfg.pressure_tags = kvs.pieces("pressure_tags", {"top"});
  }

  if (cfg.task == TaskKind::Solve) {
    cfg.diagnostics = kvs.flag("diagnostics", true);
    cfg.snapshot = kvs.flag("snapshot", false);
  } else {
    cfg.diagnostics = false;
    cfg.snapshot = false;
  }

  detail_cfg::reject_leftovers(kvs);
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config_stream(in);
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "config: cannot open '" + path + "'");
  return parse_config_stream(in);
}

// Resolved key set in canonical order; parsing the manifest reproduces the
// config exactly (and re-serializing it reproduces the manifest).
inline std::string config_manifest(const RunConfig& cfg) {
  using detail_cfg::fmt;
  using detail_cfg::join;
  std::map<std::string, std::string> out;
  out["problem"] = problem_name(cfg.problem);
  out["task"] = task_name(cfg.task);
  out["scheme"] = scheme_name(cfg.scheme);
  out["mode"] =
      cfg.options.div_weighting == DivWeighting::Weighted ? "weighted" : "unweighted";
  out["profile"] = profile_name(cfg.profile);
  out["power_alpha"] = fmt(cfg.power_alpha);
  out["rho"] = fmt(cfg.params.rho);
  out["mu"] = fmt(cfg.params.mu);
  out["c0"] = fmt(cfg.params.c0);
  out["alpha_bjs"] = fmt(cfg.params.alpha_bjs);
  out["kappa"] = fmt(cfg.params.kappa(0, 0));
  out["velocity_element"] = detail_cfg::element_name(cfg.options.velocity_kind);
  out["multiplier_element"] = detail_cfg::element_name(cfg.options.multiplier_kind);
  out["darcy_element"] = detail_cfg::element_name(cfg.options.darcy_kind);
  out["quad_degree"] = fmt(cfg.options.quad_degree);
  out["edge_quad_degree"] = fmt(cfg.options.edge_quad_degree);
  out["t_end"] = fmt(cfg.t_end);
  if (cfg.problem != ProblemKind::Custom) out["n"] = fmt(cfg.n);
  switch (cfg.task) {
    case TaskKind::Solve:
      out["epsilon"] = fmt(cfg.epsilon);
      out["delta"] = fmt(cfg.delta);
      out["steps"] = fmt(cfg.steps);
      out["diagnostics"] = cfg.diagnostics ? "on" : "off";
      out["snapshot"] = cfg.snapshot ? "on" : "off";
      break;
    case TaskKind::RefinementSweep:
      out["delta"] = fmt(cfg.delta);
      out["levels"] = fmt(cfg.levels);
      out["fixed_delta"] = cfg.fixed_delta ? "on" : "off";
      break;
    case TaskKind::ModelingSweep:
      out["steps"] = fmt(cfg.steps);
      out["epsilons"] = join(cfg.epsilons);
      out["deltas"] = join(cfg.deltas);
      break;
  }
  if (cfg.problem != ProblemKind::Manufactured) {
    out["u_in"] = fmt(cfg.u_in);
    out["levelset"] = cfg.levelset;
    out["inflow_tag"] = cfg.inflow_tag;
    out["inflow_span"] = join(std::vector<double>{cfg.inflow_low, cfg.inflow_high});
    out["wall_tags"] = join(cfg.wall_tags);
    out["pressure_tags"] = join(cfg.pressure_tags);
  }
  if (cfg.problem == ProblemKind::Custom) out["mesh_file"] = cfg.mesh_file;
  std::string text;
  for (const auto& [key, value] : out) text += key + " = " + value + "\n";
  return text;
}

}  // namespace sddi
