#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bamsim/gbam.hpp"
#include "bamsim/types.hpp"

namespace bamsim {

// Arrival phases: phase p covers (ends[p-1], ends[p]]; mean_ia[c][p] is the
// mean inter-arrival time in seconds for class c, 0 meaning inactive.
struct PhaseSchedule {
  std::vector<double> ends;
  std::vector<std::vector<double>> mean_ia;

  int phase_at(double t) const {
    for (std::size_t p = 0; p < ends.size(); ++p)
      if (t < ends[p]) return static_cast<int>(p);
    return static_cast<int>(ends.size());  // past horizon
  }
};

struct SoftSpec {
  double transition_s = 300.0;
  int steps = 5;
};

struct ControllerSpec {
  std::string sharing = "RDM";
  std::string isolating = "MAM";
  std::string initial = "RDM";
  std::string approach = "HARD";
  SoftSpec soft;
};

struct ScenarioConfig {
  std::string name;
  Bw capacity = 0;
  int classes = 0;
  std::vector<std::vector<NodeId>> route_nodes;
  std::vector<LinkId> links;  // derived from routes when the file omits them
  std::map<std::string, BehaviorPreset> presets;
  PhaseSchedule phases;
  Bw bw_min = 0, bw_max = 0;
  double holding_mean = 0.0;
  double horizon = 0.0;
  double window = 300.0;
  LinkId monitored;
  ControllerSpec controller;
  std::vector<std::string> tuples;
  std::vector<std::uint64_t> seeds;

  Path route_path(std::size_t r) const { return path_from_nodes(route_nodes[r]); }
};

inline std::optional<std::pair<long, double>> parse_tuple(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return std::nullopt;
  try {
    std::size_t used = 0;
    long p = std::stol(s.substr(0, slash), &used);
    if (used != slash) return std::nullopt;
    double u = std::stod(s.substr(slash + 1), &used);
    if (used != s.size() - slash - 1) return std::nullopt;
    if (p < 0 || u <= 0 || u >= 100) return std::nullopt;
    return std::make_pair(p, u / 100.0);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::vector<std::string> validate_scenario(const ScenarioConfig& s) {
  std::vector<std::string> v;
  if (s.classes < 1 || s.classes > kMaxClasses)
    v.push_back("classes must be in [1," + std::to_string(kMaxClasses) + "]");
  if (s.capacity <= 0) v.push_back("capacity must be positive");

  std::set<LinkId> known(s.links.begin(), s.links.end());
  if (s.route_nodes.empty()) v.push_back("at least one route required");
  for (std::size_t r = 0; r < s.route_nodes.size(); ++r) {
    if (s.route_nodes[r].size() < 2) {
      v.push_back("route " + std::to_string(r) + " needs >= 2 nodes");
      continue;
    }
    for (const LinkId& l : path_from_nodes(s.route_nodes[r]))
      if (!known.empty() && !known.count(l))
        v.push_back("route " + std::to_string(r) + " uses undeclared link " + to_string(l));
  }

  for (const auto& [name, preset] : s.presets) {
    if (preset.kind != PresetKind::CUSTOM &&
        static_cast<int>(preset.bc.size()) != s.classes) {
      v.push_back("preset " + name + ": BC table size != class count");
      continue;
    }
    try {
      GBamLinkConfig cfg = build_preset(preset, s.capacity);
      for (int c = 0; c < cfg.classes(); ++c)
        if (cfg.priv[c] > cfg.allot[c])
          v.push_back("preset " + name + ": private exceeds allotment for class " +
                      std::to_string(c));
    } catch (const std::exception& e) {
      v.push_back("preset " + name + ": " + e.what());
    }
  }

  if (s.phases.ends.empty())
    v.push_back("phase schedule empty");
  else {
    for (std::size_t p = 0; p + 1 < s.phases.ends.size(); ++p)
      if (s.phases.ends[p] >= s.phases.ends[p + 1])
        v.push_back("phase end-times must be strictly increasing");
    if (s.phases.ends.front() <= 0) v.push_back("first phase end must be positive");
    if (s.phases.ends.back() != s.horizon)
      v.push_back("last phase end must equal the horizon");
  }
  if (static_cast<int>(s.phases.mean_ia.size()) != s.classes)
    v.push_back("per-class arrival rows must match class count");
  for (std::size_t c = 0; c < s.phases.mean_ia.size(); ++c) {
    if (s.phases.mean_ia[c].size() != s.phases.ends.size())
      v.push_back("class " + std::to_string(c) + " arrival row length != phase count");
    for (double m : s.phases.mean_ia[c])
      if (m < 0) v.push_back("negative mean inter-arrival for class " + std::to_string(c));
  }

  if (s.bw_min <= 0 || s.bw_max < s.bw_min) v.push_back("bad LSP bandwidth range");
  if (s.holding_mean <= 0) v.push_back("holding mean must be positive");
  if (s.horizon <= 0) v.push_back("horizon must be positive");
  if (s.window <= 0) v.push_back("observation window must be positive");
  if (!known.empty() && !known.count(s.monitored))
    v.push_back("monitored link " + to_string(s.monitored) + " not in topology");
  if (s.seeds.empty()) v.push_back("at least one seed required");
  for (const auto& t : s.tuples)
    if (!parse_tuple(t)) v.push_back("bad controller tuple '" + t + "'");
  if (!s.tuples.empty()) {
    if (!s.presets.count(s.controller.sharing))
      v.push_back("controller sharing preset '" + s.controller.sharing + "' undefined");
    if (!s.presets.count(s.controller.isolating))
      v.push_back("controller isolating preset '" + s.controller.isolating + "' undefined");
    if (s.controller.initial != s.controller.sharing &&
        s.controller.initial != s.controller.isolating)
      v.push_back("controller initial mode must be one of the pair");
    if (s.controller.approach != "HARD" && s.controller.approach != "SOFT")
      v.push_back("controller approach must be HARD or SOFT");
    if (s.controller.soft.steps < 1) v.push_back("SOFT steps must be >= 1");
  }
  return v;
}

inline std::vector<LinkId> links_from_routes(const std::vector<std::vector<NodeId>>& routes) {
  std::set<LinkId> out;
  for (const auto& r : routes)
    for (const LinkId& l : path_from_nodes(r)) out.insert(l);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// JSON loading
// ---------------------------------------------------------------------------

namespace detail {

inline PresetKind kind_from_string(const std::string& s) {
  if (s == "MAM") return PresetKind::MAM;
  if (s == "RDM") return PresetKind::RDM;
  if (s == "GRDM") return PresetKind::GRDM;
  if (s == "ALLOCTC") return PresetKind::ALLOCTC;
  if (s == "CUSTOM") return PresetKind::CUSTOM;
  throw std::invalid_argument("unknown preset kind '" + s + "'");
}

inline std::vector<Bw> bw_list(const nlohmann::json& arr) {
  std::vector<Bw> out;
  for (const auto& v : arr) out.push_back(mbps(v.get<double>()));
  return out;
}

}  // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig s;
  s.name = j.value("name", "scenario");
  s.capacity = mbps(j.at("capacity_mbps").get<double>());
  s.classes = j.at("classes").get<int>();
  for (const auto& r : j.at("routes")) s.route_nodes.push_back(r.get<std::vector<NodeId>>());
  if (j.contains("links"))
    for (const auto& l : j["links"]) s.links.push_back({l.at(0).get<int>(), l.at(1).get<int>()});
  else
    s.links = links_from_routes(s.route_nodes);

  for (const auto& [name, pj] : j.at("presets").items()) {
    BehaviorPreset p;
    p.name = name;
    p.kind = detail::kind_from_string(pj.at("kind").get<std::string>());
    if (pj.contains("bc_mbps")) p.bc = detail::bw_list(pj["bc_mbps"]);
    if (pj.contains("bc_pct")) {
      for (const auto& v : pj["bc_pct"])
        p.bc.push_back(static_cast<Bw>(std::llround(v.get<double>() / 100.0 *
                                                    static_cast<double>(s.capacity))));
    }
    if (pj.contains("private_mbps")) p.privates = detail::bw_list(pj["private_mbps"]);
    if (pj.contains("pools_mbps")) p.pools = detail::bw_list(pj["pools_mbps"]);
    p.htl = pj.value("htl", false);
    p.lth = pj.value("lth", false);
    s.presets.emplace(name, std::move(p));
  }

  const auto& ph = j.at("phases");
  s.phases.ends = ph.at("ends_s").get<std::vector<double>>();
  s.phases.mean_ia.resize(s.classes);
  const auto& rows = ph.at("mean_interarrival_s");
  for (int c = 0; c < s.classes; ++c) {
    std::string key = "TC" + std::to_string(c);
    s.phases.mean_ia[c] = rows.at(key).get<std::vector<double>>();
  }

  const auto& lsp = j.at("lsp");
  s.bw_min = mbps(lsp.at("bandwidth_mbps").at("min").get<double>());
  s.bw_max = mbps(lsp.at("bandwidth_mbps").at("max").get<double>());
  s.holding_mean = lsp.at("holding_mean_s").get<double>();
  s.horizon = j.at("horizon_s").get<double>();
  s.window = j.value("observation_window_s", 300.0);
  if (j.contains("monitored_link"))
    s.monitored = {j["monitored_link"].at(0).get<int>(), j["monitored_link"].at(1).get<int>()};
  else if (!s.route_nodes.empty() && s.route_nodes[0].size() >= 2)
    s.monitored = {s.route_nodes[0][0], s.route_nodes[0][1]};

  if (j.contains("controller")) {
    const auto& c = j["controller"];
    s.controller.sharing = c.value("sharing", "RDM");
    s.controller.isolating = c.value("isolating", "MAM");
    s.controller.initial = c.value("initial", s.controller.sharing);
    s.controller.approach = c.value("approach", "HARD");
    if (c.contains("soft")) {
      s.controller.soft.transition_s = c["soft"].value("transition_s", 300.0);
      s.controller.soft.steps = c["soft"].value("steps", 5);
    }
  }
  if (j.contains("tuples")) s.tuples = j["tuples"].get<std::vector<std::string>>();
  if (j.contains("seeds")) s.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  return s;
}

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("parse error in " + path + ": " + e.what());
  }
  ScenarioConfig s;
  try {
    s = scenario_from_json(j);
  } catch (const std::exception& e) {
    throw ScenarioError("invalid scenario " + path + ": " + e.what());
  }
  auto violations = validate_scenario(s);
  if (!violations.empty()) {
    std::string msg = "scenario validation failed:";
    for (const auto& m : violations) msg += "\n  - " + m;
    throw ScenarioError(msg);
  }
  return s;
}

// The published evaluation scenario: four static routes on 622 Mbps links,
// Table-style BC presets, eight arrival phases, five seeds.
inline ScenarioConfig paper_scenario() {
  ScenarioConfig s;
  s.name = "paper_ntt";
  s.capacity = mbps(622);
  s.classes = 3;
  s.route_nodes = {
      {0, 2, 5, 11, 14, 19, 20, 21, 22, 26, 27, 35, 42, 51, 52},
      {0, 2, 5, 11, 14, 19, 20, 21, 22, 26, 27, 35, 42, 51, 52, 54},
      {0, 2, 5, 11, 14, 19, 20, 21, 22, 26, 27, 35, 42, 41, 45},
      {0, 2, 5, 11, 14, 19, 20, 21, 22, 26, 27, 35, 42, 41, 45, 48},
  };
  s.links = links_from_routes(s.route_nodes);
  BehaviorPreset mam{"MAM", PresetKind::MAM, {mbps(248.8), mbps(186.6), mbps(186.6)}, {}, {}, false, false};
  BehaviorPreset rdm{"RDM", PresetKind::RDM, {mbps(622), mbps(373.2), mbps(186.6)}, {}, {}, false, false};
  s.presets.emplace("MAM", mam);
  s.presets.emplace("RDM", rdm);
  s.phases.ends = {300, 600, 900, 1500, 1800, 2100, 2500, 3600};
  s.phases.mean_ia = {
      {8, 8, 8, 8, 8, 8, 8, 8},
      {0, 8, 8, 8, 100, 100, 8, 50},
      {0, 0, 8, 100, 100, 8, 8, 50},
  };
  s.bw_min = mbps(5);
  s.bw_max = mbps(15);
  s.holding_mean = 200.0;
  s.horizon = 3600.0;
  s.window = 300.0;
  s.monitored = {0, 2};
  s.controller = {};
  s.tuples = {"25/65", "30/65", "25/70", "30/70", "25/75", "30/75", "25/80", "30/80"};
  s.seeds = {101, 102, 103, 104, 105};
  return s;
}

}  // namespace bamsim
