#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "maglab/cli/run.hpp"

namespace {

int report(const maglab::cli::RunResult& r) {
  std::cout << r.summary;
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace maglab::cli;
  CLI::App app{"Ground-state energies of magnetic and non-magnetic Schrodinger operators on planar domains"};
  app.set_version_flag("--version", artifact_version());
  app.require_subcommand(1);

  int workers = workers_from_env();
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Execute a JSON run configuration");
  run_cmd->add_option("config", config_path, "Path to the config document")->required();
  run_cmd->add_option("--workers", workers, "Worker threads (default: $MAGLAB_WORKERS or 1)")
      ->check(CLI::Range(1, 1024));

  std::string verify_json;
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suite; exits 1 on any violation");
  verify_cmd->add_option("--json", verify_json, "Write the metadata document here");
  verify_cmd->add_option("--workers", workers, "Worker threads (default: $MAGLAB_WORKERS or 1)")
      ->check(CLI::Range(1, 1024));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }

  if (*run_cmd) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read " << config_path << '\n';
      return kExitInvalidConfig;
    }
    std::stringstream text;
    text << in.rdbuf();
    RunConfig cfg;
    try {
      cfg = parse_config(text.str());
    } catch (const maglab::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitInvalidConfig;
    }
    return report(run(cfg, workers));
  }

  RunConfig cfg;
  cfg.command = VerifyCommand{};
  cfg.output.json = verify_json;
  return report(run(cfg, workers));
}
