#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <string>
#include <vector>

#include <json.hpp>

#include "bamsim/sim.hpp"

namespace bamsim {

// Every (config, seed) pair is an independent run; execution order never
// affects results, so the batch may fan out across threads.
inline std::vector<RunResult> run_batch(const ScenarioConfig& scenario,
                                        const std::vector<std::string>& configs,
                                        const std::vector<std::uint64_t>& seeds,
                                        unsigned jobs = 1) {
  if (seeds.empty()) throw std::invalid_argument("run_batch: need at least one seed");
  std::vector<RunConfig> rcs;
  for (const auto& name : configs) rcs.push_back(resolve_run_config(scenario, name));

  std::vector<RunResult> results(configs.size() * seeds.size());
  auto one = [&](std::size_t ci, std::size_t si) {
    results[ci * seeds.size() + si] = run(scenario, rcs[ci], seeds[si]);
  };
  if (jobs <= 1) {
    for (std::size_t ci = 0; ci < configs.size(); ++ci)
      for (std::size_t si = 0; si < seeds.size(); ++si) one(ci, si);
  } else {
    std::vector<std::future<void>> inflight;
    for (std::size_t ci = 0; ci < configs.size(); ++ci)
      for (std::size_t si = 0; si < seeds.size(); ++si) {
        if (inflight.size() >= jobs) {
          inflight.front().get();
          inflight.erase(inflight.begin());
        }
        inflight.push_back(std::async(std::launch::async, one, ci, si));
      }
    for (auto& f : inflight) f.get();
  }
  return results;
}

struct ConfigAggregate {
  std::string config;
  long runs = 0;
  RunSummary mean;  // arithmetic mean over seeds (longs rounded at print time)
  double generated = 0, established = 0, blocked = 0, preemptions = 0, devolutions = 0,
         loans = 0;
  std::array<double, kMaxClasses> blocked_by_class{}, preemptions_by_class{};
  double peak_util = 0, mean_util = 0;
  double preemptions_std = 0, blocked_std = 0;
};

inline std::vector<ConfigAggregate> aggregate(const std::vector<std::string>& configs,
                                              const std::vector<std::uint64_t>& seeds,
                                              const std::vector<RunResult>& results) {
  std::vector<ConfigAggregate> out;
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    ConfigAggregate a;
    a.config = configs[ci];
    a.runs = static_cast<long>(seeds.size());
    std::vector<double> pre, blk;
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const RunSummary& s = results[ci * seeds.size() + si].summary;
      a.generated += s.generated;
      a.established += s.established;
      a.blocked += s.blocked;
      a.preemptions += s.preemptions;
      a.devolutions += s.devolutions;
      a.loans += s.loans;
      for (int c = 0; c < kMaxClasses; ++c) {
        a.blocked_by_class[c] += s.blocked_by_class[c];
        a.preemptions_by_class[c] += s.preemptions_by_class[c];
      }
      a.peak_util += s.monitored_peak_util;
      a.mean_util += s.monitored_mean_util;
      pre.push_back(static_cast<double>(s.preemptions));
      blk.push_back(static_cast<double>(s.blocked));
    }
    double n = static_cast<double>(seeds.size());
    a.generated /= n;
    a.established /= n;
    a.blocked /= n;
    a.preemptions /= n;
    a.devolutions /= n;
    a.loans /= n;
    for (int c = 0; c < kMaxClasses; ++c) {
      a.blocked_by_class[c] /= n;
      a.preemptions_by_class[c] /= n;
    }
    a.peak_util /= n;
    a.mean_util /= n;
    auto stddev = [&](const std::vector<double>& xs, double mean) {
      double s2 = 0;
      for (double x : xs) s2 += (x - mean) * (x - mean);
      return xs.size() > 1 ? std::sqrt(s2 / (static_cast<double>(xs.size()) - 1)) : 0.0;
    };
    a.preemptions_std = stddev(pre, a.preemptions);
    a.blocked_std = stddev(blk, a.blocked);
    out.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '/' || c == ' ') c = '-';
  return s;
}

inline std::string fmt(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

}  // namespace detail

inline void write_summary_csv(const std::filesystem::path& file, int classes,
                              const std::vector<ConfigAggregate>& aggs) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "config,runs,generated,established,blocked";
  for (int c = 0; c < classes; ++c) out << ",blocked_tc" << c;
  out << ",preemptions";
  for (int c = 0; c < classes; ++c) out << ",preemptions_tc" << c;
  out << ",devolutions,loans,peak_util,mean_util,preemptions_std,blocked_std\n";
  for (const auto& a : aggs) {
    out << a.config << ',' << a.runs << ',' << detail::fmt(a.generated) << ','
        << detail::fmt(a.established) << ',' << detail::fmt(a.blocked);
    for (int c = 0; c < classes; ++c) out << ',' << detail::fmt(a.blocked_by_class[c]);
    out << ',' << detail::fmt(a.preemptions);
    for (int c = 0; c < classes; ++c) out << ',' << detail::fmt(a.preemptions_by_class[c]);
    out << ',' << detail::fmt(a.devolutions) << ',' << detail::fmt(a.loans) << ','
        << detail::fmt(a.peak_util, 4) << ',' << detail::fmt(a.mean_util, 4) << ','
        << detail::fmt(a.preemptions_std) << ',' << detail::fmt(a.blocked_std) << '\n';
  }
}

inline void write_windows_csv(const std::filesystem::path& file, int classes,
                              const RunResult& r) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "window_start,window_end,link,class,requests,blockings,preemptions,"
         "devolutions,loans,utilization\n";
  for (const auto& w : r.windows) {
    // one row per (link, class) that appears in the window's counters, plus
    // a class -1 row carrying the link utilization
    for (const auto& [lu, util] : w.utilization) {
      out << detail::fmt(w.start, 1) << ',' << detail::fmt(w.end, 1) << ','
          << to_string(lu) << ",-1,0,0,0,0,0," << detail::fmt(util, 6) << '\n';
    }
    for (const auto& [key, c] : w.counts) {
      out << detail::fmt(w.start, 1) << ',' << detail::fmt(w.end, 1) << ','
          << to_string(key.first) << ',' << key.second << ',' << c.requests << ','
          << c.blockings << ',' << c.preemptions << ',' << c.devolutions << ','
          << c.loans << ',';
      auto uit = w.utilization.find(key.first);
      out << detail::fmt(uit == w.utilization.end() ? 0.0 : uit->second, 6) << '\n';
    }
  }
}

inline void write_modes_csv(const std::filesystem::path& file, const RunResult& r) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "time,from,to,forced_preemptions\n";
  for (const auto& m : r.modes)
    out << detail::fmt(m.time, 1) << ',' << m.from << ',' << m.to << ','
        << m.forced_preemptions << '\n';
}

inline void write_events_ndjson(const std::filesystem::path& file, const RunResult& r) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  for (const auto& ev : r.log) {
    nlohmann::json j;
    j["t"] = ev.time;
    j["kind"] = LogEvent::kind_name(ev.kind);
    switch (ev.kind) {
      case LogEvent::Kind::Arrival: {
        j["id"] = ev.id;
        j["class"] = ev.cls;
        j["bw_mbps"] = to_mbps(ev.bw);
        j["holding_s"] = ev.holding;
        std::vector<std::string> links;
        for (const auto& l : ev.path) links.push_back(to_string(l));
        j["path"] = links;
        break;
      }
      case LogEvent::Kind::Established:
        j["id"] = ev.id;
        j["loan"] = ev.loan;
        if (ev.link) j["loan_link"] = to_string(*ev.link);
        break;
      case LogEvent::Kind::Blocked:
        j["id"] = ev.id;
        if (ev.link) j["refused_link"] = to_string(*ev.link);
        break;
      case LogEvent::Kind::Teardown:
        j["id"] = ev.id;
        j["terminal"] = to_string(ev.terminal);
        j["forced"] = ev.forced;
        break;
      case LogEvent::Kind::ModeChange:
        j["from"] = ev.mode_from;
        j["to"] = ev.mode_to;
        break;
      case LogEvent::Kind::SoftStep:
        j["step"] = ev.step_index;
        j["overhang_mbps"] = to_mbps(ev.bw);
        break;
    }
    out << j.dump() << '\n';
  }
}

inline void emit_reports(const std::filesystem::path& out_dir,
                         const ScenarioConfig& scenario,
                         const std::vector<std::string>& configs,
                         const std::vector<std::uint64_t>& seeds,
                         const std::vector<RunResult>& results, bool with_events) {
  std::filesystem::create_directories(out_dir);
  write_summary_csv(out_dir / "summary.csv", scenario.classes,
                    aggregate(configs, seeds, results));
  for (std::size_t ci = 0; ci < configs.size(); ++ci)
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const RunResult& r = results[ci * seeds.size() + si];
      std::string tag = detail::sanitize(configs[ci]) + "_" + std::to_string(seeds[si]);
      write_windows_csv(out_dir / ("windows_" + tag + ".csv"), scenario.classes, r);
      write_modes_csv(out_dir / ("modes_" + tag + ".csv"), r);
      if (with_events) write_events_ndjson(out_dir / ("events_" + tag + ".ndjson"), r);
    }
}

}  // namespace bamsim
