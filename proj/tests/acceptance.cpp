// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
// Heavy batches run once up front and feed all checks.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bamsim/batch.hpp"
#include "bamsim/oracle.hpp"
#include "bamsim/sim.hpp"

using namespace bamsim;

namespace {

int failures = 0;

void report(int crit, bool ok, const std::string& what) {
  std::printf("[%s] C%d %s\n", ok ? "PASS" : "FAIL", crit, what.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const auto scenario =
      load_scenario((std::filesystem::path(BAMSIM_SCENARIO_DIR) / "paper_ntt.json").string());
  std::vector<std::string> configs{"MAM", "RDM"};
  configs.insert(configs.end(), scenario.tuples.begin(), scenario.tuples.end());
  const auto& seeds = scenario.seeds;
  const unsigned jobs = std::max(2u, std::thread::hardware_concurrency());

  std::printf("scenario %s: %zu configs x %zu seeds, %u jobs\n", scenario.name.c_str(),
              configs.size(), seeds.size(), jobs);
  auto t0 = std::chrono::steady_clock::now();
  auto results = run_batch(scenario, configs, seeds, jobs);
  std::printf("batch done in %ss\n", fmt(seconds_since(t0)).c_str());
  auto aggs = aggregate(configs, seeds, results);

  auto result_of = [&](const std::string& config, std::size_t si) -> const RunResult& {
    for (std::size_t ci = 0; ci < configs.size(); ++ci)
      if (configs[ci] == config) return results[ci * seeds.size() + si];
    throw std::logic_error("unknown config " + config);
  };
  auto agg_of = [&](const std::string& config) -> const ConfigAggregate& {
    for (const auto& a : aggs)
      if (a.config == config) return a;
    throw std::logic_error("unknown config " + config);
  };

  // C1: MAM never preempts, loans, or devolves; single run under 5 s.
  {
    bool ok = true;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const auto& s = result_of("MAM", si).summary;
      ok = ok && s.preemptions == 0 && s.loans == 0 && s.devolutions == 0;
    }
    auto t1 = std::chrono::steady_clock::now();
    run(scenario, resolve_run_config(scenario, "MAM"), seeds[0]);
    double dt = seconds_since(t1);
    ok = ok && dt < 5.0;
    report(1, ok, "MAM column exact: preemptions = loans = devolutions = 0, run took " +
                      fmt(dt) + "s");
  }

  // C2: the top class is never preempted, anywhere.
  {
    bool ok = true;
    for (const auto& r : results) ok = ok && r.summary.preemptions_by_class[2] == 0;
    report(2, ok, "top-class protection: preemptions(TC2) = 0 in every run");
  }

  // C3: generated = established + blocked, every run.
  {
    bool ok = true;
    for (const auto& r : results)
      ok = ok && r.summary.generated == r.summary.established + r.summary.blocked;
    report(3, ok, "accounting: generated = established + blocked in every run");
  }

  // C4: per seed, TC2 blocking is identical across all configurations.
  {
    bool ok = true;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      long ref = result_of(configs[0], si).summary.blocked_by_class[2];
      for (const auto& c : configs)
        ok = ok && result_of(c, si).summary.blocked_by_class[2] == ref;
    }
    report(4, ok, "TC2 blocking invariant across all " + std::to_string(configs.size()) +
                      " configurations per seed");
  }

  // C5: engine vs constraint oracles, >= 10k sequences per preset.
  {
    auto t1 = std::chrono::steady_clock::now();
    auto rdm = oracle::check_equivalence(PresetKind::RDM,
                                         {mbps(622), mbps(373.2), mbps(186.6)}, mbps(622),
                                         10000, 12345);
    auto mam = oracle::check_equivalence(PresetKind::MAM,
                                         {mbps(248.8), mbps(186.6), mbps(186.6)}, mbps(622),
                                         10000, 54321);
    double dt = seconds_since(t1);
    bool ok = rdm.mismatches == 0 && mam.mismatches == 0 && dt < 30.0;
    report(5, ok, "oracle equivalence: " + std::to_string(rdm.trials + mam.trials) +
                      " sequences, " + std::to_string(rdm.mismatches + mam.mismatches) +
                      " mismatches, " + fmt(dt) + "s");
  }

  // C6: RDM vs MAM direction (means over seeds).
  {
    const auto& rdm = agg_of("RDM");
    const auto& mam = agg_of("MAM");
    bool ok = rdm.preemptions > 0;
    for (const auto& t : scenario.tuples) ok = ok && rdm.preemptions > agg_of(t).preemptions;
    ok = ok && rdm.blocked < mam.blocked && rdm.mean_util > mam.mean_util;
    report(6, ok, "RDM vs MAM: preemptions " + fmt(rdm.preemptions) + " > tuples > 0, blocking " +
                      fmt(rdm.blocked) + " < " + fmt(mam.blocked) + ", util " +
                      fmt(rdm.mean_util, 4) + " > " + fmt(mam.mean_util, 4));
  }

  // C7: with P_max = 25, preemptions rise and blocking falls as U_min rises;
  // every tuple sits between the MAM and RDM endpoints.
  {
    std::vector<std::string> ladder{"25/65", "25/70", "25/75", "25/80"};
    bool mono = true;
    std::string detail;
    for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
      mono = mono && agg_of(ladder[i]).preemptions < agg_of(ladder[i + 1]).preemptions;
      mono = mono && agg_of(ladder[i]).blocked > agg_of(ladder[i + 1]).blocked;
    }
    for (const auto& t : ladder) detail += " " + t + ":" + fmt(agg_of(t).preemptions, 1);
    bool envelope = true;
    for (const auto& t : scenario.tuples) {
      const auto& a = agg_of(t);
      envelope = envelope && a.preemptions >= agg_of("MAM").preemptions &&
                 a.preemptions <= agg_of("RDM").preemptions &&
                 a.blocked >= agg_of("RDM").blocked && a.blocked <= agg_of("MAM").blocked;
    }
    report(7, mono && envelope,
           "tuple ordering: preemptions strictly rise, blocking strictly falls over" + detail +
               "; all tuples inside the MAM/RDM envelope");
  }

  // C8: controller correctness against the event logs.
  {
    bool ok = true;
    for (const auto& t : scenario.tuples) {
      auto rc = resolve_run_config(scenario, t);
      for (std::size_t si = 0; si < seeds.size(); ++si) {
        const RunResult& r = result_of(t, si);
        std::map<double, const MetricsWindow*> by_end;
        for (const auto& w : r.windows) by_end[w.end] = &w;
        for (const auto& m : r.modes) {
          auto it = by_end.find(m.time);
          if (it == by_end.end()) {
            ok = false;
            continue;
          }
          const MetricsWindow& w = *it->second;
          if (m.to == "MAM") ok = ok && w.preemptions_total >= rc.policy->p_max;
          if (m.to == "RDM") {
            auto u = w.utilization.find(rc.policy->monitored);
            ok = ok && (u == w.utilization.end() ? 0.0 : u->second) < rc.policy->u_min;
          }
        }
        // No sharing preemptions while in the isolating mode.
        std::string mode = rc.policy->initial_mode;
        std::size_t mi = 0;
        for (const auto& ev : r.log) {
          while (mi < r.modes.size() && ev.time > r.modes[mi].time) mode = r.modes[mi++].to;
          if (ev.kind == LogEvent::Kind::Teardown && !ev.forced &&
              ev.terminal == Terminal::preempted && mode == "MAM")
            ok = false;
        }
      }
    }
    report(8, ok, "controller: switches justified by the preceding window, no sharing "
                  "preemptions in MAM mode");
  }

  // C9: per-seed request volume within 5% of the closed-form 3336.
  {
    bool ok = true;
    std::string detail;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      double n = static_cast<double>(result_of("RDM", si).summary.generated);
      ok = ok && n > 3336 * 0.95 && n < 3336 * 1.05;
      detail += " " + std::to_string(static_cast<long>(n));
    }
    report(9, ok, "arrival volume within 5% of 3336 per seed:" + detail);
  }

  // C10: byte-identical outputs across repeated and parallel invocations.
  {
    auto tmp = std::filesystem::temp_directory_path() / "bamsim_acceptance";
    std::filesystem::remove_all(tmp);
    std::vector<std::string> cfgs{"RDM", "25/65"};
    std::vector<std::uint64_t> one_seed{seeds[0]};
    bool ok = true;
    std::vector<std::string> blobs;
    for (unsigned j : {1u, 1u, 4u}) {
      auto rs = run_batch(scenario, cfgs, one_seed, j);
      auto dir = tmp / ("j" + std::to_string(blobs.size()));
      emit_reports(dir, scenario, cfgs, one_seed, rs, true);
      std::string blob;
      std::vector<std::filesystem::path> files;
      for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) blob += f.filename().string() + "\n" + slurp(f);
      blobs.push_back(blob);
      ok = ok && !blob.empty() && blob == blobs.front();
    }
    std::filesystem::remove_all(tmp);
    report(10, ok, "determinism: event logs and CSVs byte-identical across reruns and "
                   "parallelism levels");
  }

  // C11: a SOFT switch preempts nothing and the overhang drains with traffic.
  {
    bool ok = true;
    auto rdm = scenario.presets.at("RDM");
    auto mam = scenario.presets.at("MAM");
    NetworkState net;
    for (const LinkId& l : scenario.links) net.add_link(l, build_preset(rdm, scenario.capacity));
    // Low-class LSPs leaning on shared pools on every route.
    LspId id = 1;
    for (std::size_t r = 0; r < scenario.route_nodes.size(); ++r) {
      LspRequest req{id, 0, mbps(100), scenario.route_path(r), 0.0, 0.0};
      ok = ok && setup_lsp(net, req, static_cast<double>(id)).established;
      ++id;
    }
    ControllerPolicy pol;
    pol.approach = ControllerPolicy::Approach::SOFT;
    pol.soft_transition = 300.0;
    pol.soft_steps = 5;
    auto forward = plan({Action::Kind::SwitchBehavior, mam}, pol, net, 100.0);
    Bw overhang = 0;
    for (std::size_t i = 0; i < forward.step_times.size(); ++i) {
      auto sr = execute_step(net, forward, i);
      ok = ok && sr.forced_preemptions.empty();
      overhang = sr.total_overhang;
    }
    for (const auto& [lid, link] : net.links)
      ok = ok && link.config == build_preset(mam, scenario.capacity);
    for (const auto& [lid, rec] : net.lsps) ok = ok && rec.terminal == Terminal::active;
    // Holding-time tail: all pre-switch traffic departs, overhang must drain.
    for (LspId l = 1; l < id; ++l) teardown_lsp(net, l, Terminal::departed, 500.0);
    Bw left = 0;
    for (const auto& [lid, link] : net.links) left += link.overhang();
    ok = ok && left == 0;
    auto back = plan({Action::Kind::SwitchBehavior, rdm}, pol, net, 600.0);
    for (std::size_t i = 0; i < back.step_times.size(); ++i)
      ok = ok && execute_step(net, back, i).forced_preemptions.empty();
    for (const auto& [lid, link] : net.links)
      ok = ok && link.config == build_preset(rdm, scenario.capacity);
    report(11, ok, "SOFT transition: zero induced preemptions, overhang " +
                       fmt(to_mbps(overhang), 1) + " Mbps drained to 0 after departures");
  }

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
