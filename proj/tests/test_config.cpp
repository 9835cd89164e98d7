#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sddi/driver.hpp"

using namespace sddi;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(static_cast<bool>(in));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

int line_count(const std::string& text) {
  int n = 0;
  for (const char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("minimal manufactured config resolves the benchmark defaults") {
  const RunConfig cfg = parse_config_text("problem = manufactured_6_1\n");
  REQUIRE(cfg.problem == ProblemKind::Manufactured);
  REQUIRE(cfg.task == TaskKind::Solve);
  REQUIRE(cfg.scheme == Scheme::BackwardEuler);
  REQUIRE(cfg.profile == Profile::Tanh);
  REQUIRE(cfg.params.rho == 1.0);
  REQUIRE(cfg.params.mu == 1.0);
  REQUIRE(cfg.params.c0 == 1.0);
  REQUIRE(cfg.params.alpha_bjs == 1.0);
  REQUIRE(cfg.params.kappa.isApprox(Mat2::Identity()));
  REQUIRE(cfg.t_end == 1.0);
  REQUIRE(cfg.n == 5);
  REQUIRE(cfg.steps == 5);  // dt = h
  REQUIRE(cfg.epsilon == Catch::Approx(0.2));
  REQUIRE(cfg.delta == Catch::Approx(1e-3));
  REQUIRE(cfg.options.velocity_kind == ElementKind::P2);
  REQUIRE(cfg.options.multiplier_kind == ElementKind::P1);
  REQUIRE(cfg.options.darcy_kind == ElementKind::P2);
  REQUIRE(cfg.options.div_weighting == DivWeighting::Weighted);
  REQUIRE(cfg.options.quad_degree == 6);
  REQUIRE(cfg.options.edge_quad_degree == 8);
  REQUIRE(cfg.diagnostics);
  REQUIRE_FALSE(cfg.snapshot);
}

TEST_CASE("sine preset resolves the driven-flow defaults") {
  const RunConfig cfg = parse_config_text("problem = sine_interface_6_2\n");
  REQUIRE(cfg.params.rho == 1.0);
  REQUIRE(cfg.params.mu == Catch::Approx(0.035));
  REQUIRE(cfg.params.c0 == Catch::Approx(1e-3));
  REQUIRE(cfg.params.alpha_bjs == Catch::Approx(1e3));
  REQUIRE(cfg.params.kappa(0, 0) == Catch::Approx(1e-5));
  REQUIRE(cfg.params.kappa(1, 1) == Catch::Approx(1e-5));
  REQUIRE(cfg.u_in == 10.0);
  REQUIRE(cfg.t_end == 3.0);
  REQUIRE(cfg.steps == 300);  // dt = 1e-2
  REQUIRE(cfg.n == 20);
  REQUIRE(cfg.epsilon == Catch::Approx(0.05));
  REQUIRE(cfg.options.velocity_kind == ElementKind::P1Bubble);
  REQUIRE(cfg.options.multiplier_kind == ElementKind::P1);
  REQUIRE(cfg.options.darcy_kind == ElementKind::P1);
  REQUIRE(cfg.levelset == "sine(0.1, 4, 0)");
  REQUIRE(cfg.inflow_tag == "left");
  REQUIRE(cfg.inflow_low == -1.0);
  REQUIRE(cfg.inflow_high == 0.0);
  REQUIRE(cfg.wall_tags == std::vector<std::string>{"bottom"});
  REQUIRE(cfg.pressure_tags == std::vector<std::string>{"top"});
}

TEST_CASE("violations name the offending key") {
  auto parse = [](const std::string& body) {
    return parse_config_text("problem = manufactured_6_1\n" + body);
  };
  REQUIRE_THROWS_WITH(parse("delta = 0.7\n"), ContainsSubstring("delta") &&
                                                  ContainsSubstring("(0, 1/2)"));
  REQUIRE_THROWS_WITH(parse("frobnicate = 1\n"), ContainsSubstring("unknown key 'frobnicate'"));
  REQUIRE_THROWS_WITH(parse("levels = 3\n"),
                      ContainsSubstring("'levels' only applies to task=refinement_sweep"));
  REQUIRE_THROWS_WITH(parse("u_in = 2\n"), ContainsSubstring("'u_in' only applies to"));
  REQUIRE_THROWS_WITH(parse("mesh_file = x\n"),
                      ContainsSubstring("'mesh_file' only applies to problem=custom"));
  REQUIRE_THROWS_WITH(parse("n = 5\nn = 6\n"), ContainsSubstring("duplicate key 'n'"));
  REQUIRE_THROWS_WITH(parse("just words\n"), ContainsSubstring("is not 'key = value'"));
  REQUIRE_THROWS_WITH(parse("epsilon = abc\n"),
                      ContainsSubstring("'epsilon' expects a number"));
  REQUIRE_THROWS_WITH(parse("diagnostics = banana\n"),
                      ContainsSubstring("'diagnostics' expects on/off"));
  REQUIRE_THROWS_WITH(parse("dt = 0.2\nsteps = 5\n"),
                      ContainsSubstring("either dt or steps"));
  REQUIRE_THROWS_WITH(parse("dt = 0.3\n"), ContainsSubstring("divide t_end"));
  REQUIRE_THROWS_WITH(parse("velocity_element = p1\n"),
                      ContainsSubstring("velocity_element must be p2 or p1b"));
  REQUIRE_THROWS_WITH(parse("quad_degree = 11\n"), ContainsSubstring("quad_degree"));
  REQUIRE_THROWS_WITH(parse_config_text("n = 5\n"),
                      ContainsSubstring("missing required key 'problem'"));
  REQUIRE_THROWS_WITH(parse_config_text("problem = bogus\n"),
                      ContainsSubstring("'problem' expects"));
  REQUIRE_THROWS_WITH(parse_config_text("problem = sine_interface_6_2\ntask = "
                                        "refinement_sweep\n"),
                      ContainsSubstring("requires problem=manufactured_6_1"));
  REQUIRE_THROWS_WITH(parse_config_text("problem = custom\nlevelset = flat(1)\n"),
                      ContainsSubstring("missing required key 'mesh_file'"));
  REQUIRE_THROWS_WITH(
      parse_config_text("problem = custom\nmesh_file = /no/such/mesh\nlevelset = flat(1)\n"),
      ContainsSubstring("'/no/such/mesh' does not exist"));
  REQUIRE_THROWS_WITH(parse("task = modeling_sweep\nepsilons = 0.1, 0.2\n"),
                      ContainsSubstring("epsilons must decrease"));
  REQUIRE_THROWS_WITH(parse("task = modeling_sweep\ndeltas = 1e-3\n"),
                      ContainsSubstring("one value per epsilon"));
}

TEST_CASE("dt resolves to a whole number of steps") {
  REQUIRE(parse_config_text("problem = manufactured_6_1\ndt = 0.25\n").steps == 4);
  REQUIRE(parse_config_text("problem = manufactured_6_1\nt_end = 2\ndt = 0.1\n").steps == 20);
  REQUIRE(parse_config_text("problem = manufactured_6_1\nsteps = 7\n").steps == 7);
}

TEST_CASE("comments, spacing, and aliases are tolerated") {
  const RunConfig cfg = parse_config_text(
      "# benchmark\n"
      "problem = manufactured_6_1   # preset\n"
      "\n"
      "  velocity_element=mini\n"
      "darcy_element = p1\n");
  REQUIRE(cfg.options.velocity_kind == ElementKind::P1Bubble);
  REQUIRE(cfg.options.darcy_kind == ElementKind::P1);
}

TEST_CASE("manifest is a fixed point of parse and serialize") {
  const fs::path mesh_path = fs::temp_directory_path() / "sddi_cfg_mesh.txt";
  export_mesh_file(build_uniform(manufactured_domain(2)), mesh_path.string());
  const std::vector<std::string> sources = {
      "problem = manufactured_6_1\n",
      "problem = manufactured_6_1\nscheme = midpoint\nn = 10\nepsilon = 0.07\nmode = "
      "unweighted\n",
      "problem = manufactured_6_1\ntask = refinement_sweep\nlevels = 3\nfixed_delta = on\n",
      "problem = manufactured_6_1\ntask = modeling_sweep\n",
      "problem = sine_interface_6_2\n",
      "problem = custom\nmesh_file = " + mesh_path.string() + "\nlevelset = flat(1)\nu_in = 1\n",
  };
  for (const std::string& source : sources) {
    CAPTURE(source);
    const std::string first = config_manifest(parse_config_text(source));
    const std::string second = config_manifest(parse_config_text(first));
    REQUIRE(first == second);
  }
}

TEST_CASE("modeling sweep defaults resolve the cubic regularization schedule") {
  const RunConfig cfg =
      parse_config_text("problem = manufactured_6_1\ntask = modeling_sweep\n");
  REQUIRE(cfg.profile == Profile::Clamp);
  REQUIRE(cfg.n == 80);
  REQUIRE(cfg.steps == 80);
  REQUIRE(cfg.epsilons == std::vector<double>{0.2, 0.1, 0.05});
  REQUIRE(cfg.deltas.size() == 3);
  REQUIRE(cfg.deltas[0] == Catch::Approx(8e-3));
  REQUIRE(cfg.deltas[2] == Catch::Approx(1.25e-4));
}

TEST_CASE("execute writes manifest, report, diagnostics, and snapshot") {
  const RunConfig cfg = parse_config_text(
      "problem = manufactured_6_1\nn = 4\ndiagnostics = on\nsnapshot = on\n");
  const fs::path dir = fresh_dir("sddi_cfg_solve");
  std::ostringstream log;
  DriverOptions opt;
  opt.out_dir = dir.string();
  opt.log = &log;
  execute(cfg, opt);

  REQUIRE(slurp(dir / "manifest.cfg") == config_manifest(cfg));
  const std::string report = slurp(dir / "report.csv");
  REQUIRE(report.rfind("level,h,dt,epsilon,delta,e_u,rate_u,e_p,rate_p,runtime_s\n", 0) == 0);
  REQUIRE(line_count(report) == 2);
  const std::string diag = slurp(dir / "diagnostics.csv");
  REQUIRE(diag.rfind("step,t,", 0) == 0);
  REQUIRE(line_count(diag) == 1 + cfg.steps);
  const std::string vtk = slurp(dir / "solution.vtk");
  REQUIRE(vtk.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  REQUIRE_THAT(vtk, ContainsSubstring("DATASET UNSTRUCTURED_GRID"));
  REQUIRE_THAT(vtk, ContainsSubstring("POINTS 45 double"));  // 5 x 9 grid
  REQUIRE_THAT(vtk, ContainsSubstring("VECTORS u_tot double"));
  REQUIRE_THAT(vtk, ContainsSubstring("SCALARS p_tot double 1"));
  REQUIRE_THAT(vtk, ContainsSubstring("SCALARS phi double 1"));
  REQUIRE_THAT(log.str(), ContainsSubstring("resolved configuration:"));
  REQUIRE_THAT(log.str(), ContainsSubstring("errors at t = 1"));
}

TEST_CASE("identical configs produce bitwise identical artifacts") {
  const RunConfig cfg = parse_config_text("problem = manufactured_6_1\nn = 4\n");
  const fs::path a = fresh_dir("sddi_cfg_rep_a");
  const fs::path b = fresh_dir("sddi_cfg_rep_b");
  for (const fs::path& dir : {a, b}) {
    DriverOptions opt;
    opt.out_dir = dir.string();
    execute(cfg, opt);
  }
  REQUIRE(slurp(a / "report.csv") == slurp(b / "report.csv"));
  REQUIRE(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
  REQUIRE(slurp(a / "manifest.cfg") == slurp(b / "manifest.cfg"));
}

TEST_CASE("unwritable output directory raises the output error") {
  const fs::path blocker = fs::temp_directory_path() / "sddi_cfg_blocker";
  fs::remove_all(blocker);
  std::ofstream(blocker) << "plain file\n";
  const RunConfig cfg = parse_config_text("problem = manufactured_6_1\nn = 2\n");
  DriverOptions opt;
  opt.out_dir = (blocker / "out").string();
  REQUIRE_THROWS_AS(execute(cfg, opt), output_error);
}

TEST_CASE("check mode audits the operators without stepping") {
  const RunConfig cfg = parse_config_text("problem = manufactured_6_1\nn = 4\n");
  const fs::path dir = fresh_dir("sddi_cfg_check");
  std::ostringstream log;
  DriverOptions opt;
  opt.out_dir = dir.string();
  opt.check_only = true;
  opt.log = &log;
  execute(cfg, opt);
  REQUIRE(fs::exists(dir / "manifest.cfg"));
  REQUIRE_FALSE(fs::exists(dir / "report.csv"));
  REQUIRE_THAT(log.str(), ContainsSubstring("mass matrix symmetry"));
  REQUIRE_THAT(log.str(), ContainsSubstring("audit passed"));
}

TEST_CASE("missing boundary tags are reported with the available set") {
  const fs::path mesh_path = fs::temp_directory_path() / "sddi_cfg_tagmesh.txt";
  export_mesh_file(build_uniform(manufactured_domain(2)), mesh_path.string());
  const RunConfig cfg = parse_config_text("problem = custom\nmesh_file = " + mesh_path.string() +
                                          "\nlevelset = flat(1)\nwall_tags = flagpole\nsteps = "
                                          "1\n");
  DriverOptions opt;
  opt.out_dir = fresh_dir("sddi_cfg_tags").string();
  REQUIRE_THROWS_WITH(execute(cfg, opt), ContainsSubstring("boundary tag 'flagpole'") &&
                                             ContainsSubstring("available:"));
}

TEST_CASE("custom mesh import drives a short decaying run") {
  const fs::path mesh_path = fs::temp_directory_path() / "sddi_cfg_custom.txt";
  export_mesh_file(build_uniform(manufactured_domain(3)), mesh_path.string());
  const RunConfig cfg = parse_config_text(
      "problem = custom\nmesh_file = " + mesh_path.string() +
      "\nlevelset = flat(1)\nu_in = 1\ninflow_span = 0, 1\nsteps = 2\nt_end = 0.02\n");
  const fs::path dir = fresh_dir("sddi_cfg_custom_out");
  std::ostringstream log;
  DriverOptions opt;
  opt.out_dir = dir.string();
  opt.log = &log;
  execute(cfg, opt);
  REQUIRE_FALSE(fs::exists(dir / "report.csv"));  // no exact solution to compare against
  REQUIRE(line_count(slurp(dir / "diagnostics.csv")) == 3);
}
