#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bamsim {

// Class index: 0 = lowest priority, N-1 = highest.
using ClassId = int;
using NodeId = int;
using LspId = std::int64_t;

constexpr int kMaxClasses = 8;

// Bandwidth in tenths of Mbps. Table-style values (248.8, 186.6, 373.2)
// stay exact and ledger comparisons never touch floating point.
using Bw = std::int64_t;

inline Bw mbps(double v) { return static_cast<Bw>(std::llround(v * 10.0)); }
inline double to_mbps(Bw b) { return static_cast<double>(b) / 10.0; }

struct LinkId {
  NodeId src = 0;
  NodeId dst = 0;
  auto operator<=>(const LinkId&) const = default;
};

using Path = std::vector<LinkId>;

inline Path path_from_nodes(const std::vector<NodeId>& nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("path needs >= 2 nodes");
  Path p;
  p.reserve(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    p.push_back(LinkId{nodes[i], nodes[i + 1]});
  return p;
}

inline std::string to_string(const LinkId& l) {
  return std::to_string(l.src) + "->" + std::to_string(l.dst);
}

// Per-link bandwidth pools. allot[c] is the pool owned by class c,
// priv[c] <= allot[c] is the part only class c may draw.
struct GBamLinkConfig {
  Bw capacity = 0;
  std::vector<Bw> allot;
  std::vector<Bw> priv;
  bool htl = false;  // lower classes may draw the sharable part of higher pools
  bool lth = false;  // higher classes may draw the sharable part of lower pools

  int classes() const { return static_cast<int>(allot.size()); }

  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (allot.empty() || allot.size() > kMaxClasses)
      v.push_back("class count must be in [1," + std::to_string(kMaxClasses) + "]");
    if (priv.size() != allot.size()) v.push_back("priv/allot size mismatch");
    Bw sum = 0;
    for (std::size_t c = 0; c < allot.size(); ++c) {
      if (allot[c] < 0) v.push_back("allot[" + std::to_string(c) + "] negative");
      sum += allot[c];
      if (c < priv.size() && (priv[c] < 0 || priv[c] > allot[c]))
        v.push_back("priv[" + std::to_string(c) + "] outside [0, allot]");
    }
    if (sum > capacity) v.push_back("sum of allotments exceeds capacity");
    if (capacity < 0) v.push_back("capacity negative");
    return v;
  }

  void validate() const {
    auto v = violations();
    if (!v.empty()) throw std::invalid_argument("GBamLinkConfig: " + v.front());
  }

  bool operator==(const GBamLinkConfig&) const = default;
};

enum class PresetKind { MAM, RDM, GRDM, ALLOCTC, CUSTOM };

inline std::string to_string(PresetKind k) {
  switch (k) {
    case PresetKind::MAM: return "MAM";
    case PresetKind::RDM: return "RDM";
    case PresetKind::GRDM: return "GRDM";
    case PresetKind::ALLOCTC: return "ALLOCTC";
    case PresetKind::CUSTOM: return "CUSTOM";
  }
  return "?";
}

// A named BAM behavior. bc holds BC_c per class (absolute tenths of Mbps);
// for RDM-family kinds the table must be nested (BC_0 >= BC_1 >= ...).
struct BehaviorPreset {
  std::string name;
  PresetKind kind = PresetKind::MAM;
  std::vector<Bw> bc;
  std::vector<Bw> privates;  // GRDM/CUSTOM: private portion per class
  // CUSTOM only: explicit pools and flags.
  std::vector<Bw> pools;
  bool htl = false;
  bool lth = false;
};

struct LspRequest {
  LspId id = 0;
  ClassId cls = 0;
  Bw bandwidth = 0;
  Path path;
  double arrival_time = 0.0;
  double holding_time = 0.0;
};

// How an admitted LSP is funded on one link: draw per class pool.
// Private-part draws are implicit: only the owner class may exceed the
// sharable part of a pool.
struct FundingVector {
  std::array<Bw, kMaxClasses> draw{};

  Bw total(int n) const {
    Bw s = 0;
    for (int k = 0; k < n; ++k) s += draw[k];
    return s;
  }
};

enum class Terminal { active, departed, preempted, devolved, horizon_end };

inline std::string to_string(Terminal t) {
  switch (t) {
    case Terminal::active: return "active";
    case Terminal::departed: return "departed";
    case Terminal::preempted: return "preempted";
    case Terminal::devolved: return "devolved";
    case Terminal::horizon_end: return "horizon_end";
  }
  return "?";
}

}  // namespace bamsim
