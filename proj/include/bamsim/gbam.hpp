#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "bamsim/types.hpp"

namespace bamsim {

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

// Turn a BC table into concrete pools. RDM-family tables are cumulative and
// nested, so pools telescope: A_c = BC_c - BC_{c+1}, A_{N-1} = BC_{N-1}.
inline GBamLinkConfig build_preset(const BehaviorPreset& preset, Bw capacity) {
  GBamLinkConfig cfg;
  cfg.capacity = capacity;
  const int n = static_cast<int>(
      preset.kind == PresetKind::CUSTOM ? preset.pools.size() : preset.bc.size());
  if (n < 1 || n > kMaxClasses)
    throw std::invalid_argument("build_preset: bad class count");

  auto nested = [&] {
    for (int c = 0; c + 1 < n; ++c)
      if (preset.bc[c] < preset.bc[c + 1])
        throw std::invalid_argument("build_preset: BC table not nested");
    if (preset.bc[0] > capacity)
      throw std::invalid_argument("build_preset: BC0 exceeds capacity");
  };
  auto telescope = [&] {
    cfg.allot.resize(n);
    cfg.allot[n - 1] = preset.bc[n - 1];
    for (int c = 0; c + 1 < n; ++c) cfg.allot[c] = preset.bc[c] - preset.bc[c + 1];
  };

  switch (preset.kind) {
    case PresetKind::MAM: {
      Bw sum = std::accumulate(preset.bc.begin(), preset.bc.end(), Bw{0});
      if (sum > capacity)
        throw std::invalid_argument("build_preset: MAM BC sum exceeds capacity");
      cfg.allot = preset.bc;
      cfg.priv = preset.bc;  // fully private, no sharing
      cfg.htl = cfg.lth = false;
      break;
    }
    case PresetKind::RDM:
      nested();
      telescope();
      cfg.priv.assign(n, 0);
      cfg.htl = true;
      cfg.lth = false;
      break;
    case PresetKind::ALLOCTC:
      nested();
      telescope();
      cfg.priv.assign(n, 0);
      cfg.htl = true;
      cfg.lth = true;
      break;
    case PresetKind::GRDM:
      nested();
      telescope();
      if (preset.privates.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("build_preset: GRDM needs per-class privates");
      cfg.priv = preset.privates;
      cfg.htl = true;
      cfg.lth = false;
      break;
    case PresetKind::CUSTOM:
      cfg.allot = preset.pools;
      cfg.priv = preset.privates.empty() ? std::vector<Bw>(n, 0) : preset.privates;
      cfg.htl = preset.htl;
      cfg.lth = preset.lth;
      break;
  }
  cfg.validate();
  return cfg;
}

inline bool pool_reachable(const GBamLinkConfig& cfg, ClassId cls, int pool) {
  if (pool == cls) return true;
  if (pool > cls) return cfg.htl;
  return cfg.lth;
}

// ---------------------------------------------------------------------------
// Exact class-level feasibility (tiny transportation problem)
// ---------------------------------------------------------------------------
//
// Node layout: S, class nodes, sharable-pool nodes, private-pool nodes, a
// capacity node, T. Feasible iff max flow saturates all class demands.
// N <= 8, so a plain Edmonds-Karp is more than enough and fully deterministic.

namespace detail {

struct MaxFlow {
  struct Edge {
    int to;
    Bw cap;
    int rev;
  };
  std::vector<std::vector<Edge>> g;

  explicit MaxFlow(int nodes) : g(nodes) {}

  int add_edge(int from, int to, Bw cap) {
    g[from].push_back({to, cap, static_cast<int>(g[to].size())});
    g[to].push_back({from, 0, static_cast<int>(g[from].size()) - 1});
    return static_cast<int>(g[from].size()) - 1;
  }

  // Push `amount` along a known simple path (used to seed the greedy witness).
  void push_path(const std::vector<std::pair<int, int>>& path, Bw amount) {
    for (auto [node, ei] : path) {
      Edge& e = g[node][ei];
      e.cap -= amount;
      g[e.to][e.rev].cap += amount;
    }
  }

  Bw augment(int s, int t) {
    std::vector<int> prev_node(g.size(), -1), prev_edge(g.size(), -1);
    std::vector<int> queue{s};
    prev_node[s] = s;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int u = queue[qi];
      for (int ei = 0; ei < static_cast<int>(g[u].size()); ++ei) {
        const Edge& e = g[u][ei];
        if (e.cap > 0 && prev_node[e.to] < 0) {
          prev_node[e.to] = u;
          prev_edge[e.to] = ei;
          queue.push_back(e.to);
        }
      }
    }
    if (prev_node[t] < 0) return 0;
    Bw bottleneck = INT64_MAX;
    for (int v = t; v != s; v = prev_node[v])
      bottleneck = std::min(bottleneck, g[prev_node[v]][prev_edge[v]].cap);
    for (int v = t; v != s; v = prev_node[v]) {
      Edge& e = g[prev_node[v]][prev_edge[v]];
      e.cap -= bottleneck;
      g[e.to][e.rev].cap += bottleneck;
    }
    return bottleneck;
  }

  Bw run(int s, int t) {
    Bw total = 0;
    while (Bw f = augment(s, t)) total += f;
    return total;
  }
};

// Witness pool order for class c: own pool first, then HTL pools in
// ascending index, then LTH pools in descending index.
inline std::vector<int> witness_pool_order(const GBamLinkConfig& cfg, ClassId c) {
  std::vector<int> order{static_cast<int>(c)};
  if (cfg.htl)
    for (int k = c + 1; k < cfg.classes(); ++k) order.push_back(k);
  if (cfg.lth)
    for (int k = c - 1; k >= 0; --k) order.push_back(k);
  return order;
}

}  // namespace detail

// Class-level funding: flow from class c into the private part of its own
// pool and into sharable pool parts. Deterministic: greedy witness fill
// first, augmenting paths only if the greedy fill leaves a gap.
struct ClassFlow {
  bool feasible = false;
  // draw[c][k]: class c's draw on pool k (private + sharable combined).
  std::array<std::array<Bw, kMaxClasses>, kMaxClasses> draw{};
};

inline ClassFlow solve_class_flow(const GBamLinkConfig& cfg, Bw overhang,
                                  const std::array<Bw, kMaxClasses>& demand) {
  const int n = cfg.classes();
  ClassFlow out;
  Bw total_demand = 0;
  for (int c = 0; c < n; ++c) total_demand += demand[c];
  if (total_demand == 0) {
    out.feasible = true;
    return out;
  }
  const Bw headroom = cfg.capacity - overhang;
  if (total_demand > headroom) return out;

  // Greedy witness fill, highest class first.
  std::array<Bw, kMaxClasses> shar_left{}, priv_left{};
  for (int k = 0; k < n; ++k) {
    priv_left[k] = cfg.priv[k];
    shar_left[k] = cfg.allot[k] - cfg.priv[k];
  }
  std::array<std::array<Bw, kMaxClasses>, kMaxClasses> priv_draw{}, shar_draw{};
  Bw assigned = 0;
  for (int c = n - 1; c >= 0; --c) {
    Bw need = demand[c];
    Bw take = std::min(need, priv_left[c]);
    priv_draw[c][c] += take;
    priv_left[c] -= take;
    need -= take;
    for (int k : detail::witness_pool_order(cfg, c)) {
      if (need == 0) break;
      take = std::min(need, shar_left[k]);
      shar_draw[c][k] += take;
      shar_left[k] -= take;
      need -= take;
    }
    assigned += demand[c] - need;
  }

  if (assigned < total_demand) {
    // Repair with augmenting paths over the full graph, seeded with the
    // greedy flow so the result stays close to the witness order.
    const int S = 0, CAP = 1 + 3 * n, T = CAP + 1;
    auto cls_node = [&](int c) { return 1 + c; };
    auto shar_node = [&](int k) { return 1 + n + k; };
    auto priv_node = [&](int k) { return 1 + 2 * n + k; };
    detail::MaxFlow mf(T + 1);
    std::array<int, kMaxClasses> e_src{};
    std::array<std::array<int, kMaxClasses>, kMaxClasses> e_shar{};
    e_shar.fill({});
    std::array<int, kMaxClasses> e_priv{}, e_shar_cap{}, e_priv_cap{};
    for (int c = 0; c < n; ++c) e_src[c] = mf.add_edge(S, cls_node(c), demand[c]);
    for (int c = 0; c < n; ++c) {
      e_priv[c] = mf.add_edge(cls_node(c), priv_node(c), cfg.priv[c]);
      for (int k = 0; k < n; ++k)
        if (pool_reachable(cfg, c, k))
          e_shar[c][k] = mf.add_edge(cls_node(c), shar_node(k), cfg.allot[k] - cfg.priv[k]);
        else
          e_shar[c][k] = -1;
    }
    for (int k = 0; k < n; ++k) {
      e_shar_cap[k] = mf.add_edge(shar_node(k), CAP, cfg.allot[k] - cfg.priv[k]);
      e_priv_cap[k] = mf.add_edge(priv_node(k), CAP, cfg.priv[k]);
    }
    mf.add_edge(CAP, T, headroom);
    const int e_cap_t = 0;  // only edge out of CAP
    // Seed with the greedy flow.
    for (int c = 0; c < n; ++c) {
      if (priv_draw[c][c] > 0)
        mf.push_path({{S, e_src[c]},
                      {cls_node(c), e_priv[c]},
                      {priv_node(c), e_priv_cap[c]},
                      {CAP, e_cap_t}},
                     priv_draw[c][c]);
      for (int k = 0; k < n; ++k)
        if (shar_draw[c][k] > 0)
          mf.push_path({{S, e_src[c]},
                        {cls_node(c), e_shar[c][k]},
                        {shar_node(k), e_shar_cap[k]},
                        {CAP, e_cap_t}},
                       shar_draw[c][k]);
    }
    assigned += mf.run(S, T);
    if (assigned < total_demand) return out;
    // Read final flows back.
    for (int c = 0; c < n; ++c) {
      priv_draw[c] = {};
      shar_draw[c] = {};
      priv_draw[c][c] = cfg.priv[c] - mf.g[cls_node(c)][e_priv[c]].cap;
      for (int k = 0; k < n; ++k)
        if (e_shar[c][k] >= 0)
          shar_draw[c][k] =
              (cfg.allot[k] - cfg.priv[k]) - mf.g[cls_node(c)][e_shar[c][k]].cap;
    }
  }

  out.feasible = true;
  for (int c = 0; c < n; ++c)
    for (int k = 0; k < n; ++k) out.draw[c][k] = priv_draw[c][k] + shar_draw[c][k];
  return out;
}

inline bool feasible_demands(const GBamLinkConfig& cfg, Bw overhang,
                             const std::array<Bw, kMaxClasses>& demand) {
  return solve_class_flow(cfg, overhang, demand).feasible;
}

// Maximum total bandwidth the pools can serve for the given class demands
// (demands act as upper bounds). Used for partial funding in SOFT steps.
inline Bw max_flow_value(const GBamLinkConfig& cfg, Bw overhang,
                         const std::array<Bw, kMaxClasses>& demand) {
  const int n = cfg.classes();
  const Bw headroom = cfg.capacity - overhang;
  if (headroom <= 0) return 0;
  const int S = 0, CAP = 1 + 3 * n, T = CAP + 1;
  auto cls_node = [&](int c) { return 1 + c; };
  auto shar_node = [&](int k) { return 1 + n + k; };
  auto priv_node = [&](int k) { return 1 + 2 * n + k; };
  detail::MaxFlow mf(T + 1);
  for (int c = 0; c < n; ++c) mf.add_edge(S, cls_node(c), demand[c]);
  for (int c = 0; c < n; ++c) {
    mf.add_edge(cls_node(c), priv_node(c), cfg.priv[c]);
    for (int k = 0; k < n; ++k)
      if (pool_reachable(cfg, c, k))
        mf.add_edge(cls_node(c), shar_node(k), cfg.allot[k] - cfg.priv[k]);
  }
  for (int k = 0; k < n; ++k) {
    mf.add_edge(shar_node(k), CAP, cfg.allot[k] - cfg.priv[k]);
    mf.add_edge(priv_node(k), CAP, cfg.priv[k]);
  }
  mf.add_edge(CAP, T, headroom);
  return mf.run(S, T);
}

// ---------------------------------------------------------------------------
// Link state
// ---------------------------------------------------------------------------

struct LspEntry {
  LspId id = 0;
  ClassId cls = 0;
  Bw bw = 0;
  double setup_time = 0.0;
  FundingVector funding;
};

struct LinkState {
  GBamLinkConfig config;
  std::map<LspId, LspEntry> active;
  // LSPs kept alive through a SOFT reconfiguration that no longer fully fit
  // the pools. They stay partially funded; the unfunded remainder is the
  // overhang and counts against headroom until they depart.
  std::map<LspId, LspEntry> grandfathered;
  std::uint64_t version = 0;

  Bw overhang() const {
    const int n = config.classes();
    Bw s = 0;
    for (const auto& [id, e] : grandfathered) s += e.bw - e.funding.total(n);
    return s;
  }

  std::array<Bw, kMaxClasses> class_usage() const {
    std::array<Bw, kMaxClasses> u{};
    for (const auto& [id, e] : active) u[e.cls] += e.bw;
    for (const auto& [id, e] : grandfathered) u[e.cls] += e.bw;
    return u;
  }

  // Ledger checks: per-pool totals, non-owner draws vs sharable part,
  // capacity. Throws on violation; cheap enough to run after every mutation.
  void check_invariants() const {
    const int n = config.classes();
    std::array<Bw, kMaxClasses> pool_total{}, pool_foreign{};
    Bw grand_total = 0;
    auto tally = [&](const LspEntry& e, bool partial_ok) {
      Bw funded = 0;
      for (int k = 0; k < n; ++k) {
        Bw d = e.funding.draw[k];
        if (d < 0) throw std::logic_error("negative draw");
        if (d > 0 && !pool_reachable(config, e.cls, k))
          throw std::logic_error("draw on unreachable pool");
        pool_total[k] += d;
        if (k != e.cls) pool_foreign[k] += d;
        funded += d;
      }
      if (partial_ok ? funded > e.bw : funded != e.bw)
        throw std::logic_error("funding does not match LSP bandwidth");
      grand_total += e.bw;  // grandfathered LSPs occupy their full bandwidth
    };
    for (const auto& [id, e] : active) tally(e, false);
    for (const auto& [id, e] : grandfathered) tally(e, true);
    for (int k = 0; k < n; ++k) {
      if (pool_total[k] > config.allot[k]) throw std::logic_error("pool over-allotted");
      if (pool_foreign[k] > config.allot[k] - config.priv[k])
        throw std::logic_error("private portion drawn by foreign class");
    }
    if (grand_total > config.capacity) throw std::logic_error("link over capacity");
  }
};

// ---------------------------------------------------------------------------
// Funding plans (shared by admission and reconfiguration)
// ---------------------------------------------------------------------------

// Assign concrete funding vectors to a set of LSPs, splitting each class's
// flow across its LSPs in (setup_time, id) order, pools in witness order.
inline std::optional<std::map<LspId, FundingVector>> plan_funding(
    const GBamLinkConfig& cfg, Bw overhang, std::vector<LspEntry> lsps) {
  const int n = cfg.classes();
  std::array<Bw, kMaxClasses> demand{};
  for (const auto& e : lsps) {
    if (e.cls < 0 || e.cls >= n) throw std::invalid_argument("unknown class index");
    demand[e.cls] += e.bw;
  }
  ClassFlow flow = solve_class_flow(cfg, overhang, demand);
  if (!flow.feasible) return std::nullopt;

  std::stable_sort(lsps.begin(), lsps.end(), [](const LspEntry& a, const LspEntry& b) {
    if (a.setup_time != b.setup_time) return a.setup_time < b.setup_time;
    return a.id < b.id;
  });

  std::map<LspId, FundingVector> out;
  for (int c = 0; c < n; ++c) {
    auto pools = detail::witness_pool_order(cfg, c);
    std::size_t pi = 0;
    Bw pool_left = pools.empty() ? 0 : flow.draw[c][pools[0]];
    for (const auto& e : lsps) {
      if (e.cls != c) continue;
      FundingVector fv;
      Bw need = e.bw;
      while (need > 0) {
        while (pool_left == 0) {
          if (++pi >= pools.size()) throw std::logic_error("flow/demand mismatch");
          pool_left = flow.draw[c][pools[pi]];
        }
        Bw take = std::min(need, pool_left);
        fv.draw[pools[pi]] += take;
        pool_left -= take;
        need -= take;
      }
      out.emplace(e.id, fv);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Admission
// ---------------------------------------------------------------------------

struct Victim {
  LspId id = 0;
  bool devolution = false;  // reclaimed an LTH loan (vs plain preemption)
  bool operator==(const Victim&) const = default;
};

struct AdmissionDecision {
  enum class Kind { Admit, AdmitAfterReclaim, Block };
  Kind kind = Kind::Block;
  // Full post-commit funding table for the link (Admit / AdmitAfterReclaim):
  // existing LSPs may be migrated, so every entry is authoritative.
  std::map<LspId, FundingVector> funding;
  std::vector<Victim> victims;
  std::uint64_t version = 0;
};

// Plan admission of one request. Pure: never mutates the link. Migration of
// existing funding is allowed (class usages are preserved by construction).
inline AdmissionDecision try_admit(const LinkState& link, const LspEntry& request) {
  if (request.cls < 0 || request.cls >= link.config.classes())
    throw std::invalid_argument("try_admit: unknown class index");
  if (request.bw <= 0) throw std::invalid_argument("try_admit: bandwidth must be > 0");

  AdmissionDecision d;
  d.version = link.version;
  const int n = link.config.classes();

  // Grandfathered LSPs participate with their funded part only; the unfunded
  // remainder is fixed overhang.
  auto partial_of = [&](const LspEntry& e) {
    LspEntry p = e;
    p.bw = e.funding.total(n);
    return p;
  };

  std::vector<LspEntry> entries;
  entries.reserve(link.active.size() + link.grandfathered.size() + 1);
  for (const auto& [id, e] : link.active) entries.push_back(e);
  for (const auto& [id, e] : link.grandfathered)
    if (e.funding.total(n) > 0) entries.push_back(partial_of(e));
  entries.push_back(request);

  if (auto plan = plan_funding(link.config, link.overhang(), entries)) {
    d.kind = AdmissionDecision::Kind::Admit;
    d.funding = std::move(*plan);
    return d;
  }

  // Victim search. Candidates: lower-class LSPs (preemption entitlement) and
  // holders of an LTH draw on the requester's own pool (devolution).
  struct Candidate {
    const LspEntry* e;
    bool devolution;
    bool grandfathered;
  };
  std::vector<Candidate> candidates;
  auto consider = [&](const LspEntry& e, bool gf) {
    if (e.cls < request.cls)
      candidates.push_back({&e, false, gf});
    else if (e.cls > request.cls && e.funding.draw[request.cls] > 0)
      candidates.push_back({&e, true, gf});
  };
  for (const auto& [id, e] : link.active) consider(e, false);
  for (const auto& [id, e] : link.grandfathered) consider(e, true);

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.e->cls != b.e->cls) return a.e->cls < b.e->cls;
                     if (a.e->setup_time != b.e->setup_time)
                       return a.e->setup_time > b.e->setup_time;  // newest first
                     return a.e->id > b.e->id;
                   });

  std::array<Bw, kMaxClasses> demand{};
  for (const auto& [id, e] : link.active) demand[e.cls] += e.bw;
  for (const auto& [id, e] : link.grandfathered) demand[e.cls] += e.funding.total(n);
  demand[request.cls] += request.bw;
  Bw overhang = link.overhang();

  std::vector<Victim> removed;
  for (const auto& cand : candidates) {
    removed.push_back({cand.e->id, cand.devolution});
    if (cand.grandfathered) {
      demand[cand.e->cls] -= cand.e->funding.total(n);
      overhang -= cand.e->bw - cand.e->funding.total(n);
    } else {
      demand[cand.e->cls] -= cand.e->bw;
    }
    if (feasible_demands(link.config, overhang, demand)) {
      auto is_victim = [&](LspId id) {
        return std::any_of(removed.begin(), removed.end(),
                           [&](const Victim& v) { return v.id == id; });
      };
      std::vector<LspEntry> survivors;
      for (const auto& [id, e] : link.active)
        if (!is_victim(id)) survivors.push_back(e);
      for (const auto& [id, e] : link.grandfathered)
        if (!is_victim(id) && e.funding.total(n) > 0) survivors.push_back(partial_of(e));
      survivors.push_back(request);
      auto plan = plan_funding(link.config, overhang, survivors);
      if (!plan) throw std::logic_error("victim plan infeasible after class-level check");
      d.kind = AdmissionDecision::Kind::AdmitAfterReclaim;
      d.victims = std::move(removed);
      d.funding = std::move(*plan);
      return d;
    }
  }
  d.kind = AdmissionDecision::Kind::Block;
  return d;
}

// Apply a planned decision. The decision must have been computed against this
// exact state; any interleaved mutation invalidates it.
inline void commit(LinkState& link, const AdmissionDecision& d, const LspEntry& request) {
  if (d.version != link.version)
    throw std::logic_error("commit: stale decision (link state changed since planning)");
  if (d.kind == AdmissionDecision::Kind::Block)
    throw std::logic_error("commit: cannot commit a Block decision");
  for (const auto& v : d.victims) {
    if (link.active.erase(v.id) == 0 && link.grandfathered.erase(v.id) == 0)
      throw std::logic_error("commit: victim not active on link");
  }
  link.active.emplace(request.id, request);
  for (auto& [id, fv] : d.funding) {
    if (auto it = link.active.find(id); it != link.active.end())
      it->second.funding = fv;
    else if (auto git = link.grandfathered.find(id); git != link.grandfathered.end())
      git->second.funding = fv;
    else
      throw std::logic_error("commit: funded LSP not active");
  }
  ++link.version;
  link.check_invariants();
}

// Departure. Funding of other LSPs is left as-is; migration is lazy.
inline void release(LinkState& link, LspId id) {
  if (link.active.erase(id) == 0 && link.grandfathered.erase(id) == 0)
    throw std::logic_error("release: unknown LSP id");
  ++link.version;
  link.check_invariants();
}

// ---------------------------------------------------------------------------
// Reconfiguration
// ---------------------------------------------------------------------------

namespace detail {

// Order for re-funding under a new config: highest class first, oldest first.
inline std::vector<LspEntry> refund_order(const LinkState& link) {
  std::vector<LspEntry> all;
  for (const auto& [id, e] : link.active) all.push_back(e);
  for (const auto& [id, e] : link.grandfathered) all.push_back(e);
  std::stable_sort(all.begin(), all.end(), [](const LspEntry& a, const LspEntry& b) {
    if (a.cls != b.cls) return a.cls > b.cls;
    if (a.setup_time != b.setup_time) return a.setup_time < b.setup_time;
    return a.id < b.id;
  });
  return all;
}

}  // namespace detail

// Immediate switch. LSPs that cannot be fully re-funded under the new config
// are preempted and returned.
inline std::vector<LspId> apply_config_hard(LinkState& link, const GBamLinkConfig& cfg) {
  cfg.validate();
  auto all = detail::refund_order(link);
  std::vector<LspEntry> kept;
  std::vector<LspId> preempted;
  std::array<Bw, kMaxClasses> demand{};
  for (const auto& e : all) {
    demand[e.cls] += e.bw;
    if (feasible_demands(cfg, 0, demand))
      kept.push_back(e);
    else {
      demand[e.cls] -= e.bw;
      preempted.push_back(e.id);
    }
  }
  auto plan = plan_funding(cfg, 0, kept);
  if (!plan) throw std::logic_error("apply_config_hard: prefix plan infeasible");
  link.config = cfg;
  link.active.clear();
  link.grandfathered.clear();
  for (auto& e : kept) {
    e.funding = (*plan)[e.id];
    link.active.emplace(e.id, e);
  }
  ++link.version;
  link.check_invariants();
  return preempted;
}

// One step of a SOFT transition: re-fund under the interpolated config; LSPs
// that no longer fully fit are grandfathered (never preempted), keep as much
// funding as the pools allow, and their unfunded remainder (the overhang)
// reduces the headroom for new requests. Returns the overhang after the step.
inline Bw apply_config_soft_step(LinkState& link, const GBamLinkConfig& cfg) {
  cfg.validate();
  auto all = detail::refund_order(link);
  std::vector<LspEntry> kept;
  std::vector<std::pair<LspEntry, Bw>> grand;  // entry, funded part
  std::array<Bw, kMaxClasses> demand{};
  Bw overhang = 0;
  for (const auto& e : all) {
    demand[e.cls] += e.bw;
    if (feasible_demands(cfg, overhang, demand)) {
      kept.push_back(e);
      continue;
    }
    demand[e.cls] -= e.bw;
    Bw base = 0;
    for (int c = 0; c < cfg.classes(); ++c) base += demand[c];
    demand[e.cls] += e.bw;
    Bw funded = std::min(e.bw, max_flow_value(cfg, overhang, demand) - base);
    demand[e.cls] -= e.bw - funded;
    overhang += e.bw - funded;
    grand.emplace_back(e, funded);
  }
  std::vector<LspEntry> to_fund = kept;
  for (const auto& [e, funded] : grand)
    if (funded > 0) {
      LspEntry p = e;
      p.bw = funded;
      to_fund.push_back(p);
    }
  auto plan = plan_funding(cfg, overhang, to_fund);
  if (!plan) throw std::logic_error("apply_config_soft_step: prefix plan infeasible");
  link.config = cfg;
  link.active.clear();
  link.grandfathered.clear();
  for (auto& e : kept) {
    e.funding = (*plan)[e.id];
    link.active.emplace(e.id, e);
  }
  for (auto& [e, funded] : grand) {
    e.funding = funded > 0 ? (*plan)[e.id] : FundingVector{};
    link.grandfathered.emplace(e.id, e);
  }
  ++link.version;
  link.check_invariants();
  return overhang;
}

// Linear interpolation of pools and privates. Intermediate steps keep the
// union of the two sharing flag sets so a shrinking sharable region drains
// into grandfathering instead of cutting over at step one; the final step
// (frac >= 1) is the exact target.
inline GBamLinkConfig interp_config(const GBamLinkConfig& from, const GBamLinkConfig& to,
                                    double frac) {
  if (frac >= 1.0) return to;
  GBamLinkConfig cfg;
  const int n = to.classes();
  cfg.capacity = to.capacity;
  cfg.allot.resize(n);
  cfg.priv.resize(n);
  auto lerp = [&](Bw a, Bw b) {
    return a + static_cast<Bw>(std::llround(frac * static_cast<double>(b - a)));
  };
  for (int c = 0; c < n; ++c) {
    cfg.allot[c] = lerp(from.allot[c], to.allot[c]);
    cfg.priv[c] = std::min(lerp(from.priv[c], to.priv[c]), cfg.allot[c]);
  }
  cfg.htl = from.htl || to.htl;
  cfg.lth = from.lth || to.lth;
  cfg.validate();
  return cfg;
}

}  // namespace bamsim
