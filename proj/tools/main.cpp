// Command line front end: `sddi solve <config> [--out DIR] [--threads N]
// [--check]`.  Failures print a machine-readable JSON error record to stderr;
// an unwritable output directory exits with 2, every other failure with 1.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sddi/driver.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
  nlohmann::json record;
  record["error"]["kind"] = kind;
  record["error"]["message"] = message;
  std::cerr << record.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stokes-Darcy diffuse-interface benchmark solver"};
  app.require_subcommand(1);
  CLI::App* solve = app.add_subcommand("solve", "run a config file and write its artifacts");
  std::string config_path;
  std::string out_dir = "out";
  int threads = 1;
  bool check = false;
  solve->add_option("config", config_path, "path to a key = value config file")->required();
  solve->add_option("--out", out_dir, "output directory (created if absent)");
  solve->add_option("--threads", threads, "concurrent sweep levels")
      ->check(CLI::PositiveNumber);
  solve->add_flag("--check", check, "audit the assembled operators, no time stepping");
  CLI11_PARSE(app, argc, argv);

  sddi::RunConfig cfg;
  try {
    cfg = sddi::parse_config(config_path);
  } catch (const std::exception& e) {
    return fail("config", e.what(), 1);
  }
  try {
    sddi::DriverOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    opt.check_only = check;
    opt.log = &std::cout;
    sddi::execute(cfg, opt);
  } catch (const sddi::output_error& e) {
    return fail("output", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("run", e.what(), 1);
  }
  return 0;
}
