#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bamsim/gbam.hpp"
#include "bamsim/types.hpp"

namespace bamsim {

struct LspRecord {
  LspRequest request;
  double setup_time = 0.0;
  Terminal terminal = Terminal::active;
  std::optional<double> terminal_time;
};

struct NetworkState {
  std::map<LinkId, LinkState> links;
  std::map<LspId, LspRecord> lsps;

  void add_link(LinkId id, const GBamLinkConfig& cfg) {
    LinkState ls;
    ls.config = cfg;
    links.emplace(id, std::move(ls));
  }
};

struct VictimInfo {
  LspId id = 0;
  bool devolution = false;
};

struct SetupResult {
  bool established = false;
  std::vector<VictimInfo> victims;       // torn down network-wide on success
  std::optional<LinkId> refused_link;    // first refusing link when blocked
};

namespace detail {

// Copy-on-write view over the network's links, so a blocked setup leaves the
// real state untouched without copying every link.
struct LinkOverlay {
  NetworkState& net;
  std::map<LinkId, LinkState> modified;

  explicit LinkOverlay(NetworkState& n) : net(n) {}

  LinkState& get(const LinkId& id) {
    auto it = modified.find(id);
    if (it != modified.end()) return it->second;
    auto base = net.links.find(id);
    if (base == net.links.end()) throw std::invalid_argument("unknown link " + to_string(id));
    return modified.emplace(id, base->second).first->second;
  }

  void apply() {
    for (auto& [id, ls] : modified) net.links[id] = std::move(ls);
  }
};

}  // namespace detail

// Atomic multi-link setup. Links are planned in path order; each planned
// victim is removed from every link of its own path before replanning, so
// freed bandwidth propagates. Nothing is applied unless every link admits.
inline SetupResult setup_lsp(NetworkState& net, const LspRequest& req, double now) {
  SetupResult result;
  detail::LinkOverlay overlay(net);
  std::map<LspId, bool> victim_devolution;  // id -> saw an LTH-draw reclaim

  LspEntry entry{req.id, req.cls, req.bandwidth, now, {}};

  for (const LinkId& lid : req.path) {
    for (;;) {
      LinkState& link = overlay.get(lid);
      AdmissionDecision d = try_admit(link, entry);
      if (d.kind == AdmissionDecision::Kind::Admit) {
        commit(link, d, entry);
        break;
      }
      if (d.kind == AdmissionDecision::Kind::Block) {
        result.established = false;
        result.refused_link = lid;
        return result;  // overlay discarded, state bit-identical
      }
      // Reclaim: remove each victim from all links of its own path, then
      // replan this link against the freed state.
      for (const Victim& v : d.victims) {
        auto rec = net.lsps.find(v.id);
        if (rec == net.lsps.end()) throw std::logic_error("victim without record");
        auto& dev = victim_devolution[v.id];
        dev = dev || v.devolution;
        for (const LinkId& vl : rec->second.request.path) {
          LinkState& vls = overlay.get(vl);
          if (vls.active.count(v.id) || vls.grandfathered.count(v.id)) release(vls, v.id);
        }
      }
    }
  }

  overlay.apply();
  net.lsps.emplace(req.id, LspRecord{req, now, Terminal::active, std::nullopt});
  for (auto& [id, dev] : victim_devolution) {
    auto& rec = net.lsps.at(id);
    rec.terminal = dev ? Terminal::devolved : Terminal::preempted;
    rec.terminal_time = now;
    result.victims.push_back({id, dev});
  }
  result.established = true;
  return result;
}

// Network-wide teardown with terminal-state recording.
inline void teardown_lsp(NetworkState& net, LspId id, Terminal terminal, double now) {
  auto it = net.lsps.find(id);
  if (it == net.lsps.end()) throw std::logic_error("teardown: unknown LSP");
  if (it->second.terminal != Terminal::active)
    throw std::logic_error("teardown: LSP already terminated");
  for (const LinkId& lid : it->second.request.path) {
    LinkState& ls = net.links.at(lid);
    if (ls.active.count(id) || ls.grandfathered.count(id)) release(ls, id);
  }
  it->second.terminal = terminal;
  it->second.terminal_time = now;
}

}  // namespace bamsim
