#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "bamsim/autonomic.hpp"
#include "bamsim/events.hpp"
#include "bamsim/network.hpp"
#include "bamsim/scenario.hpp"
#include "bamsim/telemetry.hpp"

namespace bamsim {

// ---------------------------------------------------------------------------
// Seeded random streams
// ---------------------------------------------------------------------------

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Substream engine derived from (master seed, generator id, stream tag).
inline std::mt19937_64 substream(std::uint64_t master, std::uint64_t gen_id,
                                 std::uint64_t tag) {
  return std::mt19937_64(splitmix64(splitmix64(master ^ (gen_id << 20)) ^ tag));
}

inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double exponential(std::mt19937_64& eng, double mean) {
  return -mean * std::log(1.0 - uniform01(eng));
}

// Uniform on the 0.1 Mbps lattice, inclusive.
inline Bw uniform_bw(std::mt19937_64& eng, Bw lo, Bw hi) {
  return lo + static_cast<Bw>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace rng

// ---------------------------------------------------------------------------
// Arrival generation
// ---------------------------------------------------------------------------

// One generator per (class, route). Each has three independent substreams
// (inter-arrival, bandwidth, holding), so the full request sequence is a
// function of (scenario, seed) alone and identical across BAM configurations.
struct Generator {
  int id = 0;
  ClassId cls = 0;
  std::size_t route = 0;
};

inline std::vector<Generator> make_generators(const ScenarioConfig& s) {
  std::vector<Generator> gens;
  int id = 0;
  for (std::size_t r = 0; r < s.route_nodes.size(); ++r)
    for (ClassId c = 0; c < s.classes; ++c) gens.push_back({id++, c, r});
  return gens;
}

// Next arrival for a piecewise-exponential phase schedule. A draw that would
// cross the current phase boundary is restarted at the boundary with the new
// phase's mean (memorylessness makes this exact); inactive phases (mean 0)
// always restart, i.e. are skipped.
inline std::optional<double> next_arrival(const PhaseSchedule& phases, ClassId cls,
                                          std::mt19937_64& eng, double now) {
  double t = now;
  const double horizon = phases.ends.back();
  while (t < horizon) {
    int p = phases.phase_at(t);
    if (p >= static_cast<int>(phases.ends.size())) break;
    double mean = phases.mean_ia[cls][p];
    if (mean <= 0) {
      t = phases.ends[p];
      continue;
    }
    double d = rng::exponential(eng, mean);
    if (t + d >= phases.ends[p]) {
      t = phases.ends[p];
      continue;
    }
    return t + d;
  }
  return std::nullopt;
}

inline std::vector<LspRequest> generate_requests(const ScenarioConfig& s,
                                                 std::uint64_t seed) {
  struct Raw {
    double time;
    int gen;
    ClassId cls;
    std::size_t route;
    Bw bw;
    double holding;
  };
  std::vector<Raw> raw;
  for (const Generator& g : make_generators(s)) {
    auto arrivals = rng::substream(seed, g.id, 0);
    auto bws = rng::substream(seed, g.id, 1);
    auto holds = rng::substream(seed, g.id, 2);
    double t = 0.0;
    while (auto next = next_arrival(s.phases, g.cls, arrivals, t)) {
      t = *next;
      raw.push_back({t, g.id, g.cls, g.route, rng::uniform_bw(bws, s.bw_min, s.bw_max),
                     rng::exponential(holds, s.holding_mean)});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.gen < b.gen;
  });
  std::vector<LspRequest> out;
  out.reserve(raw.size());
  LspId id = 1;
  for (const Raw& r : raw) {
    out.push_back({id++, r.cls, r.bw, s.route_path(r.route), r.time, r.holding});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string name;
  std::string static_preset;               // fixed-behavior run
  std::optional<ControllerPolicy> policy;  // tuple-driven switching run
};

inline RunConfig resolve_run_config(const ScenarioConfig& s, const std::string& name) {
  RunConfig rc;
  rc.name = name;
  if (s.presets.count(name)) {
    rc.static_preset = name;
    return rc;
  }
  auto tuple = parse_tuple(name);
  if (!tuple)
    throw ScenarioError("config '" + name + "' is neither a preset nor a P/U tuple");
  if (!s.presets.count(s.controller.sharing) || !s.presets.count(s.controller.isolating))
    throw ScenarioError("scenario lacks the controller behavior pair");
  ControllerPolicy p;
  p.window = s.window;
  p.p_max = tuple->first;
  p.u_min = tuple->second;
  p.monitored = s.monitored;
  p.approach = s.controller.approach == "SOFT" ? ControllerPolicy::Approach::SOFT
                                               : ControllerPolicy::Approach::HARD;
  p.soft_transition = s.controller.soft.transition_s;
  p.soft_steps = s.controller.soft.steps;
  p.sharing = s.presets.at(s.controller.sharing);
  p.isolating = s.presets.at(s.controller.isolating);
  p.initial_mode = s.controller.initial;
  rc.policy = std::move(p);
  return rc;
}

// ---------------------------------------------------------------------------
// The run
// ---------------------------------------------------------------------------

struct ModeChangeRecord {
  double time = 0.0;
  std::string from, to;
  long forced_preemptions = 0;
};

struct RunResult {
  std::string config_name;
  std::uint64_t seed = 0;
  EventLog log;
  std::vector<MetricsWindow> windows;
  RunSummary summary;
  std::vector<ModeChangeRecord> modes;
  std::size_t generated = 0;
};

namespace detail {

struct SimEvent {
  double time;
  int rank;  // departure 0 < arrival 1 < window_tick 2 < controller_eval 3 < soft_step 4
  long seq;
  LspId lsp = 0;
  std::size_t index = 0;  // arrival: request index; soft_step: step index

  bool operator>(const SimEvent& o) const {
    if (time != o.time) return time > o.time;
    if (rank != o.rank) return rank > o.rank;
    return seq > o.seq;
  }
};

}  // namespace detail

inline RunResult run(const ScenarioConfig& scenario, const RunConfig& rc,
                     std::uint64_t seed) {
  RunResult result;
  result.config_name = rc.name;
  result.seed = seed;

  std::string mode = rc.policy ? rc.policy->initial_mode : rc.static_preset;
  const BehaviorPreset* initial =
      &scenario.presets.at(rc.policy ? mode : rc.static_preset);

  NetworkState net;
  for (const LinkId& l : scenario.links)
    net.add_link(l, build_preset(*initial, scenario.capacity));

  auto requests = generate_requests(scenario, seed);
  result.generated = requests.size();

  Telemetry tel(scenario.window, scenario.capacity, scenario.monitored);
  auto emit = [&](const LogEvent& ev) {
    result.log.push_back(ev);
    tel.on_event(ev);
  };

  std::priority_queue<detail::SimEvent, std::vector<detail::SimEvent>, std::greater<>> queue;
  long seq = 0;
  for (std::size_t i = 0; i < requests.size(); ++i)
    queue.push({requests[i].arrival_time, 1, seq++, 0, i});
  for (double b = scenario.window; b < scenario.horizon; b += scenario.window) {
    queue.push({b, 2, seq++, 0, 0});
    if (rc.policy) queue.push({b, 3, seq++, 0, 0});
  }

  std::optional<MetricsWindow> last_window;
  std::optional<TransitionPlan> transition;
  std::size_t transition_step = 0;

  auto teardown_and_log = [&](LspId id, Terminal terminal, double t, bool forced) {
    const auto& rec = net.lsps.at(id);
    LogEvent ev;
    ev.time = t;
    ev.kind = LogEvent::Kind::Teardown;
    ev.id = id;
    ev.cls = rec.request.cls;
    ev.bw = rec.request.bandwidth;
    ev.terminal = terminal;
    ev.forced = forced;
    emit(ev);
  };

  while (!queue.empty()) {
    detail::SimEvent ev = queue.top();
    queue.pop();
    const double t = ev.time;
    switch (ev.rank) {
      case 1: {  // arrival
        const LspRequest& req = requests[ev.index];
        LogEvent a;
        a.time = t;
        a.kind = LogEvent::Kind::Arrival;
        a.id = req.id;
        a.cls = req.cls;
        a.bw = req.bandwidth;
        a.holding = req.holding_time;
        a.path = req.path;
        emit(a);

        SetupResult r = setup_lsp(net, req, t);
        if (!r.established) {
          LogEvent b;
          b.time = t;
          b.kind = LogEvent::Kind::Blocked;
          b.id = req.id;
          b.cls = req.cls;
          b.link = r.refused_link;
          emit(b);
          break;
        }
        for (const VictimInfo& v : r.victims)
          teardown_and_log(v.id, v.devolution ? Terminal::devolved : Terminal::preempted,
                           t, false);
        LogEvent e;
        e.time = t;
        e.kind = LogEvent::Kind::Established;
        e.id = req.id;
        e.cls = req.cls;
        for (const LinkId& l : req.path) {
          const auto& entry = net.links.at(l).active.at(req.id);
          for (int k = 0; k < req.cls; ++k)
            if (entry.funding.draw[k] > 0 && !e.loan) {
              e.loan = true;
              e.link = l;
            }
        }
        emit(e);
        double dep = t + req.holding_time;
        if (dep <= scenario.horizon) queue.push({dep, 0, seq++, req.id, 0});
        break;
      }
      case 0: {  // departure
        auto it = net.lsps.find(ev.lsp);
        if (it == net.lsps.end() || it->second.terminal != Terminal::active)
          break;  // preempted or devolved earlier; departure cancelled
        teardown_lsp(net, ev.lsp, Terminal::departed, t);
        teardown_and_log(ev.lsp, Terminal::departed, t, false);
        break;
      }
      case 2: {  // window tick
        last_window = tel.close_window(t);
        break;
      }
      case 3: {  // controller evaluation
        if (!rc.policy || !last_window) break;
        if (transition) break;  // a SOFT transition is still in flight
        WindowObservation obs;
        obs.preemptions = last_window->preemptions_total;
        auto uit = last_window->utilization.find(rc.policy->monitored);
        obs.monitored_util = uit == last_window->utilization.end() ? 0.0 : uit->second;
        Action action = analyze(*rc.policy, obs, mode);
        if (action.kind != Action::Kind::SwitchBehavior) break;

        TransitionPlan tp = plan(action, *rc.policy, net, t);
        LogEvent mc;
        mc.time = t;
        mc.kind = LogEvent::Kind::ModeChange;
        mc.mode_from = mode;
        mc.mode_to = action.target.name;
        emit(mc);
        ModeChangeRecord rec{t, mode, action.target.name, 0};
        mode = action.target.name;

        if (tp.hard) {
          StepResult sr = execute_step(net, tp, 0);
          for (LspId vid : sr.forced_preemptions) {
            auto& vrec = net.lsps.at(vid);
            if (vrec.terminal != Terminal::active) continue;
            teardown_lsp(net, vid, Terminal::preempted, t);
            teardown_and_log(vid, Terminal::preempted, t, true);
            rec.forced_preemptions++;
          }
        } else {
          transition = tp;
          transition_step = 0;
          for (std::size_t i = 0; i < tp.step_times.size(); ++i)
            if (tp.step_times[i] <= scenario.horizon)
              queue.push({tp.step_times[i], 4, seq++, 0, i});
        }
        result.modes.push_back(rec);
        break;
      }
      case 4: {  // soft step
        if (!transition) break;
        StepResult sr = execute_step(net, *transition, ev.index);
        LogEvent se;
        se.time = t;
        se.kind = LogEvent::Kind::SoftStep;
        se.step_index = static_cast<int>(ev.index);
        se.bw = sr.total_overhang;
        emit(se);
        if (ev.index + 1 == transition->step_times.size()) transition.reset();
        break;
      }
    }
  }

  // Horizon: every still-active LSP gets its terminal state.
  for (auto& [id, rec] : net.lsps)
    if (rec.terminal == Terminal::active) {
      teardown_lsp(net, id, Terminal::horizon_end, scenario.horizon);
      teardown_and_log(id, Terminal::horizon_end, scenario.horizon, false);
    }
  tel.close_window(scenario.horizon);

  result.windows = tel.windows();
  result.summary = tel.summary();
  return result;
}

}  // namespace bamsim
