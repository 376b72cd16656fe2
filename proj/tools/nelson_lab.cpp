#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nelson/runner.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string part = s.substr(pos, comma - pos);
    if (!part.empty()) out.push_back(part);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nelson_lab: multiscale ground-state experiments on truncated "
               "Fock spaces"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suites_csv, artifact_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  bool have_seed = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", config_path, "configuration file")
          ->required();
    cmd->add_option("--out", out_dir, "output directory override");
    cmd->add_option("--threads", threads, "worker threads over the (P,g) grid");
    cmd->add_option("--seed", seed, "solver seed")->each([&](const std::string&) {
      have_seed = true;
    });
  };

  CLI::App* plan = app.add_subcommand("plan", "validate parameters and print the schedule");
  add_common(plan, true);
  CLI::App* run = app.add_subcommand("run", "run the configured sweeps");
  add_common(run, true);
  CLI::App* verify = app.add_subcommand("verify", "run verification suites on an artifact");
  verify->add_option("artifact", artifact_dir, "artifact directory")->required();
  verify->add_option("--suites", suites_csv, "comma-separated suite list");
  CLI::App* report = app.add_subcommand("report", "emit plot-data CSVs from an artifact");
  report->add_option("artifact", artifact_dir, "artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(verify))
      return nelson::cmd_verify(artifact_dir, split_list(suites_csv), std::cout);
    if (app.got_subcommand(report))
      return nelson::cmd_report(artifact_dir, std::cout);

    nelson::ExperimentConfig config = nelson::load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (threads > 0) {
      config.threads = threads;
    } else if (const char* env = std::getenv("NELSON_LAB_THREADS")) {
      config.threads = std::max(1, std::atoi(env));
    }
    if (have_seed) config.seed = seed;

    if (app.got_subcommand(plan)) return nelson::cmd_plan(config, std::cout);
    return nelson::cmd_run(config, std::cout);
  } catch (const nelson::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
