#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "bamsim/events.hpp"
#include "bamsim/types.hpp"

namespace bamsim {

// The six per-(link, class) monitoring metrics of one observation window.
struct WindowCounts {
  long requests = 0;
  long blockings = 0;
  long preemptions = 0;
  long devolutions = 0;
  long loans = 0;
  bool operator==(const WindowCounts&) const = default;
};

struct MetricsWindow {
  double start = 0.0, end = 0.0;
  std::map<std::pair<LinkId, ClassId>, WindowCounts> counts;
  std::map<LinkId, double> utilization;  // time-weighted mean, in [0,1]
  // Network-level rollups used by the controller.
  long preemptions_total = 0;
  long devolutions_total = 0;
  long blockings_total = 0;
  long requests_total = 0;
  long loans_total = 0;
  bool operator==(const MetricsWindow&) const = default;
};

struct RunSummary {
  long generated = 0, established = 0, blocked = 0;
  std::array<long, kMaxClasses> blocked_by_class{};
  long preemptions = 0;
  std::array<long, kMaxClasses> preemptions_by_class{};
  long devolutions = 0;
  long loans = 0;
  long departed = 0, horizon_end = 0;
  double monitored_peak_util = 0.0;
  double monitored_mean_util = 0.0;
  bool operator==(const RunSummary&) const = default;
};

// Streaming accumulator over the event log. Feeding the same log twice
// produces identical windows and summary (pure fold; no simulator state).
class Telemetry {
 public:
  Telemetry(double window_len, Bw link_capacity, LinkId monitored)
      : window_len_(window_len), capacity_(link_capacity), monitored_(monitored) {}

  void on_event(const LogEvent& ev) {
    advance_to(ev.time);
    switch (ev.kind) {
      case LogEvent::Kind::Arrival: {
        pending_[ev.id] = {ev.cls, ev.bw, ev.path};
        bump(ev.path.front(), ev.cls).requests++;
        window_.requests_total++;
        break;
      }
      case LogEvent::Kind::Established: {
        const auto& p = pending_.at(ev.id);
        for (const LinkId& l : p.path) add_used(l, p.bw);
        if (ev.loan) {
          bump(ev.link.value_or(p.path.front()), p.cls).loans++;
          window_.loans_total++;
          summary_.loans++;
        }
        summary_.established++;
        break;
      }
      case LogEvent::Kind::Blocked: {
        const auto& p = pending_.at(ev.id);
        bump(ev.link.value_or(p.path.front()), p.cls).blockings++;
        window_.blockings_total++;
        summary_.blocked++;
        summary_.blocked_by_class[p.cls]++;
        pending_.erase(ev.id);
        break;
      }
      case LogEvent::Kind::Teardown: {
        const auto& p = pending_.at(ev.id);
        for (const LinkId& l : p.path) add_used(l, -p.bw);
        switch (ev.terminal) {
          case Terminal::preempted:
            bump(p.path.front(), p.cls).preemptions++;
            window_.preemptions_total++;
            summary_.preemptions++;
            summary_.preemptions_by_class[p.cls]++;
            break;
          case Terminal::devolved:
            bump(p.path.front(), p.cls).devolutions++;
            window_.devolutions_total++;
            summary_.devolutions++;
            break;
          case Terminal::departed:
            summary_.departed++;
            break;
          case Terminal::horizon_end:
            summary_.horizon_end++;
            break;
          default:
            throw std::logic_error("teardown with active terminal");
        }
        pending_.erase(ev.id);
        break;
      }
      case LogEvent::Kind::ModeChange:
      case LogEvent::Kind::SoftStep:
        break;
    }
  }

  // Close the window ending at `t` (must be on the window grid or the final
  // partial window at the horizon).
  const MetricsWindow& close_window(double t) {
    advance_to(t);
    window_.start = window_start_;
    window_.end = t;
    double len = t - window_start_;
    for (auto& [l, integral] : integral_) {
      window_.utilization[l] =
          len > 0 ? integral / (to_mbps(capacity_) * len) : 0.0;
      integral = 0.0;
    }
    if (len > 0) {
      double u = window_.utilization.count(monitored_) ? window_.utilization[monitored_] : 0.0;
      monitored_util_sum_ += u * len;
      monitored_time_ += len;
      if (u > summary_.monitored_peak_util) summary_.monitored_peak_util = u;
    }
    windows_.push_back(window_);
    window_ = MetricsWindow{};
    window_start_ = t;
    return windows_.back();
  }

  double current_used_mbps(const LinkId& l) const {
    auto it = used_.find(l);
    return it == used_.end() ? 0.0 : to_mbps(it->second);
  }

  const std::vector<MetricsWindow>& windows() const { return windows_; }

  RunSummary summary() const {
    RunSummary s = summary_;
    s.generated = s.established + s.blocked;
    s.monitored_mean_util =
        monitored_time_ > 0 ? monitored_util_sum_ / monitored_time_ : 0.0;
    return s;
  }

 private:
  struct Pending {
    ClassId cls;
    Bw bw;
    Path path;
  };

  WindowCounts& bump(const LinkId& l, ClassId c) { return window_.counts[{l, c}]; }

  void add_used(const LinkId& l, Bw delta) {
    Bw& u = used_[l];
    u += delta;
    if (u < 0 || u > capacity_) throw std::logic_error("link usage outside [0, capacity]");
  }

  void advance_to(double t) {
    if (t < now_) throw std::logic_error("telemetry fed out of order");
    double dt = t - now_;
    if (dt > 0)
      for (const auto& [l, u] : used_) integral_[l] += to_mbps(u) * dt;
    now_ = t;
  }

  double window_len_;
  Bw capacity_;
  LinkId monitored_;
  double now_ = 0.0, window_start_ = 0.0;
  std::map<LinkId, Bw> used_;
  std::map<LinkId, double> integral_;
  std::map<LspId, Pending> pending_;
  MetricsWindow window_;
  std::vector<MetricsWindow> windows_;
  RunSummary summary_;
  double monitored_util_sum_ = 0.0, monitored_time_ = 0.0;
};

// Events at an interior window boundary sort before the boundary close
// unless they were emitted by the controller (which runs after the close).
inline bool before_window_close(const LogEvent& ev) {
  if (ev.kind == LogEvent::Kind::ModeChange || ev.kind == LogEvent::Kind::SoftStep)
    return false;
  if (ev.kind == LogEvent::Kind::Teardown && ev.forced) return false;
  return true;
}

// Rebuild windows and summary from a finished log. Matches the in-run fold
// exactly: interior boundaries at multiples of the window length, final
// (possibly partial) window closed at the horizon after all events.
inline Telemetry replay(const EventLog& log, double window_len, double horizon,
                        Bw capacity, LinkId monitored) {
  Telemetry t(window_len, capacity, monitored);
  std::vector<double> boundaries;
  for (double b = window_len; b < horizon; b += window_len) boundaries.push_back(b);
  boundaries.push_back(horizon);
  std::size_t bi = 0;
  for (const auto& ev : log) {
    while (bi + 1 < boundaries.size() &&
           (boundaries[bi] < ev.time ||
            (boundaries[bi] == ev.time && !before_window_close(ev)))) {
      t.close_window(boundaries[bi]);
      ++bi;
    }
    t.on_event(ev);
  }
  while (bi < boundaries.size()) {
    t.close_window(boundaries[bi]);
    ++bi;
  }
  return t;
}

}  // namespace bamsim
