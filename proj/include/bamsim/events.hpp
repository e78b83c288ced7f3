#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bamsim/types.hpp"

namespace bamsim {

// One entry of the run's ordered event log. The log is self-contained:
// telemetry and all acceptance checks are folds over it.
struct LogEvent {
  enum class Kind {
    Arrival,     // request drawn: id, cls, bw, path, holding
    Established, // id admitted on every link; loan flag if any LTH draw
    Blocked,     // id refused; link = first refusing link
    Teardown,    // id left the network: terminal says why; forced = config-induced
    ModeChange,  // controller switched behavior
    SoftStep,    // one SOFT transition step applied network-wide
  };

  double time = 0.0;
  Kind kind = Kind::Arrival;
  LspId id = 0;
  ClassId cls = 0;
  Bw bw = 0;
  double holding = 0.0;
  Path path;
  std::optional<LinkId> link;  // Blocked: refusing link; Established: first loan link
  bool loan = false;
  Terminal terminal = Terminal::active;
  bool forced = false;  // Teardown caused by a HARD reconfiguration
  std::string mode_from, mode_to;
  int step_index = 0;

  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::Arrival: return "arrival";
      case Kind::Established: return "established";
      case Kind::Blocked: return "blocked";
      case Kind::Teardown: return "teardown";
      case Kind::ModeChange: return "mode_change";
      case Kind::SoftStep: return "soft_step";
    }
    return "?";
  }
};

using EventLog = std::vector<LogEvent>;

}  // namespace bamsim
