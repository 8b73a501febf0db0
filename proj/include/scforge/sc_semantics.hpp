#pragma once

#include <compare>

#include "scforge/parser.hpp"

namespace scforge {

// ---------------------------------------------------------------------------
// External event schedules
// ---------------------------------------------------------------------------

/// Which events the environment broadcasts at the start of each macro-cycle.
/// Events are visible to every chart during that cycle and vanish at its end.
struct EventEnv {
  std::map<int, std::set<std::string>> schedule;

  std::set<std::string> at(int cycle) const {
    auto it = schedule.find(cycle);
    return it == schedule.end() ? std::set<std::string>{} : it->second;
  }
};

/// Parses the line format `cycle <k>: eventA, eventB`. `//` comments and
/// blank lines are ignored; events must be declared in the network.
EventEnv parse_schedule(const std::string& text, const StatechartNetwork& net,
                        std::vector<Diagnostic>& diags);
std::string schedule_to_text(const EventEnv& env);

// ---------------------------------------------------------------------------
// Timers
// ---------------------------------------------------------------------------

/// One stopwatch per trigger occurrence, advancing one unit at the end of
/// every macro-cycle. An `after` slot ticks in the first cycle its stopwatch
/// reaches the duration and is dead afterwards, consumed or not. An `every`
/// slot ticks on the free-running grid tau, 2*tau, ...: its stopwatch resets
/// at the end of any ticking cycle, consumed or not.
struct TimerSlot {
  TriggerKind kind = TriggerKind::After;
  std::int64_t amount = 0;
  std::int64_t clock = 0;
  bool armed = true;

  auto operator<=>(const TimerSlot&) const = default;
};

struct TimerBank {
  std::vector<TimerSlot> slots;  // indexed by trigger occurrence id

  TimerBank() = default;
  explicit TimerBank(const StatechartNetwork& net);

  /// Occurrence ids whose trigger holds during the current cycle.
  std::set<int> ticking() const;

  /// Advances time across a macro-cycle boundary: ticking `every` slots
  /// reset, ticking `after` slots disarm (stopwatch zeroed so equal banks
  /// compare equal), then every armed stopwatch gains one unit.
  void end_cycle();

  auto operator<=>(const TimerBank&) const = default;
};

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

SystemStatus initial_status(const StatechartNetwork& net);

struct MicroStep {
  SystemStatus status;  // status after the step
  std::string label;    // "Chart.transition" or the stutter label
};

/// Runs the single micro-step of the chart selected by status.exec_index:
/// the lowest-priority-number enabled transition fires its composite action
/// <exit; transition; entry> atomically, otherwise the chart stutters.
MicroStep micro_step(const StatechartNetwork& net, const SystemStatus& status,
                     const std::set<std::string>& events,
                     const std::set<int>& ticking);

/// One full macro-cycle: n micro-steps in chart-priority order, then the
/// timer boundary. Mutates status and timers in place and returns the n
/// intermediate results.
std::vector<MicroStep> macro_cycle(const StatechartNetwork& net, SystemStatus& status,
                                   const std::set<std::string>& events,
                                   TimerBank& timers);

/// Runs `horizon` macro-cycles from the initial status.
ExecutionTrace run(const StatechartNetwork& net, const EventEnv& env, int horizon);

/// Text dump, one row per status: `cycle.micro | (states) | vars | label`.
std::string dump_trace(const ExecutionTrace& trace);

}  // namespace scforge
