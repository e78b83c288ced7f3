#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bamsim/gbam.hpp"
#include "bamsim/network.hpp"
#include "bamsim/types.hpp"

namespace bamsim {

// Administrator-facing knobs: observation window, preemption ceiling,
// utilization floor, and the behavior pair to switch between.
struct ControllerPolicy {
  double window = 300.0;
  long p_max = 25;
  double u_min = 0.65;
  LinkId monitored;
  enum class Approach { HARD, SOFT } approach = Approach::HARD;
  double soft_transition = 300.0;
  int soft_steps = 5;
  BehaviorPreset sharing;    // e.g. RDM: high utilization, preemptions happen
  BehaviorPreset isolating;  // e.g. MAM: no sharing, no preemptions
  std::string initial_mode;  // name of one of the pair
};

struct WindowObservation {
  long preemptions = 0;
  double monitored_util = 0.0;
};

struct Action {
  enum class Kind { None, SwitchBehavior, ReconfigureBCs, Optimize };
  Kind kind = Kind::None;
  BehaviorPreset target;  // SwitchBehavior / ReconfigureBCs
};

struct UnsupportedAction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One analysis rule: fires against the closed window, yields an action.
struct AnalysisRule {
  std::string name;
  std::function<bool(const ControllerPolicy&, const WindowObservation&, const std::string&)> applies;
  std::function<Action(const ControllerPolicy&)> action;
};

inline std::vector<AnalysisRule> default_rules() {
  return {
      {"preemption-ceiling",
       [](const ControllerPolicy& p, const WindowObservation& o, const std::string& mode) {
         return mode == p.sharing.name && o.preemptions >= p.p_max;
       },
       [](const ControllerPolicy& p) {
         return Action{Action::Kind::SwitchBehavior, p.isolating};
       }},
      {"utilization-floor",
       [](const ControllerPolicy& p, const WindowObservation& o, const std::string& mode) {
         return mode == p.isolating.name && o.monitored_util < p.u_min;
       },
       [](const ControllerPolicy& p) {
         return Action{Action::Kind::SwitchBehavior, p.sharing};
       }},
  };
}

inline Action analyze(const ControllerPolicy& policy, const WindowObservation& obs,
                      const std::string& current_mode,
                      const std::vector<AnalysisRule>& rules = default_rules()) {
  for (const auto& rule : rules)
    if (rule.applies(policy, obs, current_mode)) return rule.action(policy);
  return Action{Action::Kind::None, {}};
}

// A scheduled transition: one step for HARD, K interpolated steps for SOFT.
// Per-link start configs are captured at planning time so interpolation has
// a fixed origin.
struct TransitionPlan {
  BehaviorPreset target;
  std::vector<double> step_times;
  std::vector<double> fractions;  // fraction per step; last is 1.0
  std::map<LinkId, GBamLinkConfig> start;
  bool hard = true;
};

inline TransitionPlan plan(const Action& action, const ControllerPolicy& policy,
                           const NetworkState& net, double now) {
  if (action.kind == Action::Kind::Optimize)
    throw UnsupportedAction("BAM optimization is an extension hook, not implemented");
  if (action.kind == Action::Kind::None)
    throw std::invalid_argument("plan: nothing to plan for Action::None");
  TransitionPlan p;
  p.target = action.target;
  for (const auto& [id, link] : net.links) p.start.emplace(id, link.config);
  if (policy.approach == ControllerPolicy::Approach::HARD) {
    p.hard = true;
    p.step_times = {now};
    p.fractions = {1.0};
  } else {
    p.hard = false;
    const int k = policy.soft_steps;
    for (int i = 1; i <= k; ++i) {
      p.step_times.push_back(now + policy.soft_transition * i / k);
      p.fractions.push_back(static_cast<double>(i) / k);
    }
  }
  return p;
}

struct StepResult {
  std::vector<LspId> forced_preemptions;  // nonempty only for HARD steps
  Bw total_overhang = 0;                  // SOFT: grandfathered bandwidth left
};

// Apply one step of the plan to every link (switching is network-wide).
// HARD preemptions are collected here; the caller tears the victims down
// network-wide and logs them.
inline StepResult execute_step(NetworkState& net, const TransitionPlan& plan,
                               std::size_t step) {
  StepResult out;
  double frac = plan.fractions.at(step);
  for (auto& [id, link] : net.links) {
    GBamLinkConfig target = build_preset(plan.target, link.config.capacity);
    if (plan.hard) {
      auto victims = apply_config_hard(link, target);
      out.forced_preemptions.insert(out.forced_preemptions.end(), victims.begin(),
                                    victims.end());
    } else {
      GBamLinkConfig cfg = interp_config(plan.start.at(id), target, frac);
      out.total_overhang += apply_config_soft_step(link, cfg);
    }
  }
  std::sort(out.forced_preemptions.begin(), out.forced_preemptions.end());
  out.forced_preemptions.erase(
      std::unique(out.forced_preemptions.begin(), out.forced_preemptions.end()),
      out.forced_preemptions.end());
  return out;
}

}  // namespace bamsim
