#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "d2dcoop/config.hpp"
#include "d2dcoop/runner.hpp"
#include "d2dcoop/verify.hpp"

namespace {

int do_run(const std::string& config_path, const std::string& out_dir,
           const std::optional<std::uint64_t>& seed_flag, int threads) {
  d2dcoop::ExperimentSpec spec;
  if (!config_path.empty()) spec = d2dcoop::load_config(config_path);
  // Seed precedence: command line beats the environment beats the file.
  if (const auto env_seed = d2dcoop::seed_from_env()) spec.seed = *env_seed;
  if (seed_flag) spec.seed = *seed_flag;
  if (threads >= 0) spec.threads = threads;

  d2dcoop::run_sweep(spec, out_dir, &std::cout);
  std::cout << "wrote " << out_dir << "/aggregate.csv and " << out_dir
            << "/scenarios.csv\n";
  return 0;
}

int do_verify(const std::vector<int>& ids, const std::string& report_path,
              int threads) {
  const std::vector<int> selected =
      ids.empty() ? d2dcoop::all_criterion_ids() : ids;
  bool all_pass = true;
  std::vector<d2dcoop::CriterionResult> results;
  for (const int id : selected) {
    const d2dcoop::CriterionResult r =
        d2dcoop::run_criterion(id, threads >= 0 ? threads : 0);
    std::printf("[%s] C%d %s: %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.measured.c_str(), r.seconds);
    std::fflush(stdout);
    all_pass = all_pass && r.pass;
    results.push_back(r);
  }
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("cannot open report file: " + report_path);
    d2dcoop::write_report_csv(out, results);
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-timescale cooperative D2D resource allocation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "results";
  std::optional<std::uint64_t> seed_flag;
  int threads = -1;

  CLI::App* run = app.add_subcommand("run", "run the configured sweep");
  run->add_option("--config", config_path,
                  "config file; omit for the built-in defaults");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed_flag, "override the master seed");
  run->add_option("--threads", threads, "worker threads (0 = hardware)");

  std::vector<int> criteria;
  std::string report_path;
  CLI::App* verify = app.add_subcommand("verify", "run the verification report");
  verify->add_option("--criteria", criteria, "criterion ids (default: all)");
  verify->add_option("--out", report_path, "also write the report as CSV");
  verify->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(config_path, out_dir, seed_flag, threads);
    return do_verify(criteria, report_path, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
