#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bamsim/gbam.hpp"
#include "bamsim/types.hpp"

// Constraint-form single-link oracles. These are written straight from the
// BC inequalities and keep no funding attribution at all, so they form an
// independent check on the pool-based engine.

namespace bamsim::oracle {

struct OracleRequest {
  enum class Op { Arrive, Release };
  Op op = Op::Arrive;
  LspId id = 0;
  ClassId cls = 0;
  Bw bw = 0;
};

struct OracleDecision {
  enum class Kind { Admit, AdmitWithVictims, Block, Released };
  Kind kind = Kind::Block;
  std::vector<LspId> victims;
  bool operator==(const OracleDecision&) const = default;
};

namespace detail {

struct OracleLsp {
  LspId id;
  ClassId cls;
  Bw bw;
  std::int64_t order;  // arrival order, newest = largest
};

// Greedy victim removal identical to the engine's rule: lowest class first,
// newest first, stop at the first feasible prefix.
template <typename Feasible>
std::vector<OracleDecision> run_oracle(int n_classes, Feasible feasible,
                                       bool allow_preemption,
                                       const std::vector<OracleRequest>& seq) {
  std::vector<OracleLsp> active;
  std::vector<OracleDecision> out;
  std::int64_t order = 0;
  std::array<Bw, kMaxClasses> u{};
  for (const auto& r : seq) {
    if (r.op == OracleRequest::Op::Release) {
      auto it = std::find_if(active.begin(), active.end(),
                             [&](const OracleLsp& l) { return l.id == r.id; });
      if (it != active.end()) {
        u[it->cls] -= it->bw;
        active.erase(it);
      }
      out.push_back({OracleDecision::Kind::Released, {}});
      continue;
    }
    ++order;
    u[r.cls] += r.bw;
    if (feasible(u)) {
      active.push_back({r.id, r.cls, r.bw, order});
      out.push_back({OracleDecision::Kind::Admit, {}});
      continue;
    }
    if (!allow_preemption) {
      u[r.cls] -= r.bw;
      out.push_back({OracleDecision::Kind::Block, {}});
      continue;
    }
    std::vector<OracleLsp> cands;
    for (const auto& l : active)
      if (l.cls < r.cls) cands.push_back(l);
    std::stable_sort(cands.begin(), cands.end(), [](const OracleLsp& a, const OracleLsp& b) {
      if (a.cls != b.cls) return a.cls < b.cls;
      return a.order > b.order;
    });
    std::vector<LspId> victims;
    bool ok = false;
    for (const auto& v : cands) {
      victims.push_back(v.id);
      u[v.cls] -= v.bw;
      if (feasible(u)) {
        ok = true;
        break;
      }
    }
    if (ok) {
      for (LspId vid : victims)
        active.erase(std::find_if(active.begin(), active.end(),
                                  [&](const OracleLsp& l) { return l.id == vid; }));
      active.push_back({r.id, r.cls, r.bw, order});
      out.push_back({OracleDecision::Kind::AdmitWithVictims, victims});
    } else {
      for (const auto& v : cands)
        if (std::find(victims.begin(), victims.end(), v.id) != victims.end())
          u[v.cls] += v.bw;
      u[r.cls] -= r.bw;
      out.push_back({OracleDecision::Kind::Block, {}});
    }
  }
  return out;
}

}  // namespace detail

// RDM: nested cumulative constraints, sum_{c>=k} u_c <= BC_k; preemption of
// lowest-class-newest victims when a request fits only after removal.
inline std::vector<OracleDecision> rdm_constraint_oracle(
    const std::vector<Bw>& bc, const std::vector<OracleRequest>& seq) {
  const int n = static_cast<int>(bc.size());
  auto feasible = [&, n](const std::array<Bw, kMaxClasses>& u) {
    Bw suffix = 0;
    for (int k = n - 1; k >= 0; --k) {
      suffix += u[k];
      if (suffix > bc[k]) return false;
    }
    return true;
  };
  return detail::run_oracle(n, feasible, /*allow_preemption=*/true, seq);
}

// MAM: per-class caps, u_c <= BC_c; blocking is the only refusal.
inline std::vector<OracleDecision> mam_constraint_oracle(
    const std::vector<Bw>& bc, const std::vector<OracleRequest>& seq) {
  const int n = static_cast<int>(bc.size());
  auto feasible = [&, n](const std::array<Bw, kMaxClasses>& u) {
    for (int k = 0; k < n; ++k)
      if (u[k] > bc[k]) return false;
    return true;
  };
  return detail::run_oracle(n, feasible, /*allow_preemption=*/false, seq);
}

// Drive the G-BAM engine over the same sequence and report decisions in
// oracle terms.
inline std::vector<OracleDecision> run_engine(const GBamLinkConfig& cfg,
                                              const std::vector<OracleRequest>& seq) {
  LinkState link;
  link.config = cfg;
  std::vector<OracleDecision> out;
  double t = 0.0;
  for (const auto& r : seq) {
    t += 1.0;
    if (r.op == OracleRequest::Op::Release) {
      if (link.active.count(r.id)) release(link, r.id);
      out.push_back({OracleDecision::Kind::Released, {}});
      continue;
    }
    LspEntry e{r.id, r.cls, r.bw, t, {}};
    auto d = try_admit(link, e);
    switch (d.kind) {
      case AdmissionDecision::Kind::Admit:
        commit(link, d, e);
        out.push_back({OracleDecision::Kind::Admit, {}});
        break;
      case AdmissionDecision::Kind::AdmitAfterReclaim: {
        std::vector<LspId> victims;
        for (const auto& v : d.victims) victims.push_back(v.id);
        commit(link, d, e);
        out.push_back({OracleDecision::Kind::AdmitWithVictims, victims});
        break;
      }
      case AdmissionDecision::Kind::Block:
        out.push_back({OracleDecision::Kind::Block, {}});
        break;
    }
  }
  return out;
}

struct EquivalenceReport {
  long trials = 0;
  long mismatches = 0;
  std::string first_mismatch;
};

// Randomized engine-vs-oracle comparison over request/release sequences.
// One trial = one fresh link and one sequence of ~len operations.
inline EquivalenceReport check_equivalence(PresetKind kind, const std::vector<Bw>& bc,
                                           Bw capacity, long trials, unsigned seed,
                                           int len = 40) {
  BehaviorPreset preset{to_string(kind), kind, bc, {}, {}, false, false};
  GBamLinkConfig cfg = build_preset(preset, capacity);
  const int n = static_cast<int>(bc.size());
  std::mt19937_64 rng(seed);
  EquivalenceReport rep;
  for (long trial = 0; trial < trials; ++trial) {
    ++rep.trials;
    std::vector<OracleRequest> seq;
    std::vector<LspId> alive;
    LspId next_id = 1;
    for (int i = 0; i < len; ++i) {
      bool arrive = alive.empty() || (rng() % 100) < 65;
      if (arrive) {
        OracleRequest r;
        r.op = OracleRequest::Op::Arrive;
        r.id = next_id++;
        r.cls = static_cast<ClassId>(rng() % n);
        r.bw = 50 + static_cast<Bw>(rng() % 1500);  // 5..155 Mbps
        seq.push_back(r);
        alive.push_back(r.id);  // may be refused; Release on a dead id is a no-op
      } else {
        std::size_t j = rng() % alive.size();
        seq.push_back({OracleRequest::Op::Release, alive[j], 0, 0});
        alive.erase(alive.begin() + j);
      }
    }
    auto engine = run_engine(cfg, seq);
    auto expected = kind == PresetKind::MAM ? mam_constraint_oracle(bc, seq)
                                           : rdm_constraint_oracle(bc, seq);
    if (engine != expected) {
      ++rep.mismatches;
      if (rep.first_mismatch.empty())
        rep.first_mismatch = "trial " + std::to_string(trial);
    }
  }
  return rep;
}

}  // namespace bamsim::oracle
