// Command-line front end: load a scenario, run one configuration or the
// whole batch, emit CSV/NDJSON reports, or run the engine-vs-oracle check.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bamsim/batch.hpp"
#include "bamsim/oracle.hpp"
#include "bamsim/scenario.hpp"
#include "bamsim/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::vector<std::uint64_t> pick_seeds(const bamsim::ScenarioConfig& s,
                                      const std::vector<std::uint64_t>& cli_seeds) {
  return cli_seeds.empty() ? s.seeds : cli_seeds;
}

int run_configs(const std::string& scenario_path,
                const std::vector<std::string>& configs,
                const std::vector<std::uint64_t>& cli_seeds, const std::string& out_dir,
                bool events, unsigned jobs) {
  bamsim::ScenarioConfig scenario;
  try {
    scenario = bamsim::load_scenario(scenario_path);
    for (const auto& c : configs) bamsim::resolve_run_config(scenario, c);
  } catch (const bamsim::ScenarioError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  try {
    auto seeds = pick_seeds(scenario, cli_seeds);
    auto results = bamsim::run_batch(scenario, configs, seeds, jobs);
    bamsim::emit_reports(out_dir, scenario, configs, seeds, results, events);
    auto aggs = bamsim::aggregate(configs, seeds, results);
    std::printf("%-10s %10s %12s %10s %12s %10s\n", "config", "generated", "established",
                "blocked", "preemptions", "mean_util");
    for (const auto& a : aggs)
      std::printf("%-10s %10.1f %12.1f %10.1f %12.1f %10.4f\n", a.config.c_str(),
                  a.generated, a.established, a.blocked, a.preemptions, a.mean_util);
    std::printf("reports written to %s\n", out_dir.c_str());
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return kExitRuntime;
  }
}

int oracle_check(long trials, unsigned seed) {
  using namespace bamsim;
  try {
    const std::vector<Bw> rdm_bc{mbps(622), mbps(373.2), mbps(186.6)};
    const std::vector<Bw> mam_bc{mbps(248.8), mbps(186.6), mbps(186.6)};
    auto rdm = oracle::check_equivalence(PresetKind::RDM, rdm_bc, mbps(622), trials, seed);
    std::printf("RDM preset vs nested-constraint oracle: %ld trials, %ld mismatches\n",
                rdm.trials, rdm.mismatches);
    auto mam = oracle::check_equivalence(PresetKind::MAM, mam_bc, mbps(622), trials, seed + 1);
    std::printf("MAM preset vs per-class-cap oracle:     %ld trials, %ld mismatches\n",
                mam.trials, mam.mismatches);
    if (rdm.mismatches || mam.mismatches) {
      std::fprintf(stderr, "oracle mismatch (first: %s)\n",
                   (rdm.mismatches ? rdm : mam).first_mismatch.c_str());
      return kExitRuntime;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandwidth Allocation Model simulator (G-BAM engine + autonomic switching)"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", config;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> configs;
  bool events = false, all = false;
  unsigned jobs = 1;
  long trials = 10000;
  unsigned oracle_seed = 12345;

  auto* run_cmd = app.add_subcommand("run", "Run one configuration across seeds");
  run_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  run_cmd->add_option("--config", config, "Preset name (MAM, RDM, ...) or P/U tuple (25/65)")
      ->required();
  run_cmd->add_option("--seeds", seeds, "Seeds (default: scenario seeds)")->delimiter(',');
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_flag("--events", events, "Also write per-run event logs (NDJSON)");
  run_cmd->add_option("--jobs", jobs, "Parallel runs");

  auto* batch_cmd = app.add_subcommand("batch", "Run many configurations across seeds");
  batch_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  batch_cmd->add_flag("--all", all, "All presets plus every tuple in the scenario");
  batch_cmd->add_option("--configs", configs, "Explicit configuration list")->delimiter(',');
  batch_cmd->add_option("--seeds", seeds, "Seeds (default: scenario seeds)")->delimiter(',');
  batch_cmd->add_option("--out", out_dir, "Output directory");
  batch_cmd->add_flag("--events", events, "Also write per-run event logs (NDJSON)");
  batch_cmd->add_option("--jobs", jobs, "Parallel runs");

  auto* oracle_cmd = app.add_subcommand("oracle-check", "Engine vs constraint-oracle equivalence");
  oracle_cmd->add_option("--trials", trials, "Randomized sequences per preset");
  oracle_cmd->add_option("--seed", oracle_seed, "RNG seed for the check");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return run_configs(scenario_path, {config}, seeds, out_dir, events, jobs);
  if (batch_cmd->parsed()) {
    if (all) {
      bamsim::ScenarioConfig s;
      try {
        s = bamsim::load_scenario(scenario_path);
      } catch (const bamsim::ScenarioError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
      }
      configs.clear();
      if (s.presets.count("MAM")) configs.push_back("MAM");
      for (const auto& t : s.tuples) configs.push_back(t);
      if (s.presets.count("RDM")) configs.push_back("RDM");
    }
    if (configs.empty()) {
      std::fprintf(stderr, "error: batch needs --all or --configs\n");
      return kExitValidation;
    }
    return run_configs(scenario_path, configs, seeds, out_dir, events, jobs);
  }
  return oracle_check(trials, oracle_seed);
}
