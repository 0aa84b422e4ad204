// Command-line front end: run, verify and list scenarios.
#include "rfi/errors.hpp"
#include "rfi/registry.hpp"
#include "rfi/runner.hpp"
#include "rfi/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

namespace {

enum Exit { kPass = 0, kAssertion = 1, kConfig = 2, kRuntime = 3 };

int execute(const std::string& path, const rfi::RunOptions& options) {
  try {
    const rfi::Scenario sc = rfi::load_scenario(path);
    const rfi::RunResult result = rfi::run_scenario(sc, options);
    std::cout << result.report;
    if (options.write_files) std::cout << "outputs: " << result.out_dir << "\n";
    if (!result.passed()) {
      std::cerr << "failed assertions:\n";
      for (const auto& a : result.assertions) {
        if (!a.passed) std::cerr << "  " << a.name << ": " << a.detail << "\n";
      }
    }
    return result.exit_code();
  } catch (const rfi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random function iteration: scenario runner and diagnostics"};
  app.require_subcommand(1);

  std::string path;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "run a scenario and write CSV outputs and report.txt");
  run->add_option("scenario", path, "scenario file or bundled scenario name")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
  auto* out_opt = run->add_option("--out", out, "output directory");
  run->add_option("--threads", threads, "worker threads (scheduling only)")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "run a scenario's assertions without writing files");
  verify->add_option("scenario", path, "scenario file or bundled scenario name")->required();
  auto* vseed_opt = verify->add_option("--seed", seed, "override the scenario seed");
  verify->add_option("--threads", threads, "worker threads (scheduling only)")->check(CLI::PositiveNumber);

  app.add_subcommand("list", "list built-in operators, families, kernels and bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfig;
  }

  rfi::RunOptions options;
  options.threads = threads;
  if (*run) {
    if (*seed_opt) options.seed = seed;
    if (*out_opt) options.out_dir = out;
    return execute(path, options);
  }
  if (*verify) {
    if (*vseed_opt) options.seed = seed;
    options.write_files = false;
    return execute(path, options);
  }
  std::cout << rfi::list_builtin();
  return kPass;
}
