#pragma once

#include "scforge/ta_semantics.hpp"

namespace scforge {

// ---------------------------------------------------------------------------
// Projection
// ---------------------------------------------------------------------------

/// Rephrases a timed-network trace in statechart terms: auxiliary automata,
/// channels and clocks are dropped, locations map back to states through the
/// transformation bookkeeping, the lockstep index becomes the execution
/// index, and only the lockstep steps themselves survive (solo timer fires
/// and delays carry no statechart counterpart). Labels of self-loop edges —
/// which have no source transition — become the stutter label. Returns
/// nothing and reports MAP_MISMATCH when the trace, the map and the network
/// do not belong together.
std::optional<ExecutionTrace> project_ta_trace(const TimedAutomatonNetwork& ta,
                                               const TransformMap& map,
                                               const TaTrace& trace,
                                               std::vector<Diagnostic>& diags);

// ---------------------------------------------------------------------------
// Trace and model comparison
// ---------------------------------------------------------------------------

struct Divergence {
  int schedule_index = -1;  // which schedule exposed it (-1: single trace pair)
  int status_index = -1;    // first differing status (0 is the initial status)
  std::string left_status;
  std::string right_status;
  std::string left_label;   // step that produced the differing status, or "-"
  std::string right_label;
  std::string message;
  std::string schedule_text;  // replayable witness
};

struct EquivalenceReport {
  bool equivalent = true;
  int schedules_tested = 0;
  int horizon = 0;
  std::optional<std::uint64_t> seed;  // set when schedules were generated
  std::optional<Divergence> first_divergence;
};

/// Pointwise status comparison of two micro-step-aligned traces. Equivalent
/// iff both have the same shape and every status pair is equal; otherwise
/// the report pins the first differing index. Symmetric in its arguments.
EquivalenceReport check_traces(const ExecutionTrace& left,
                               const ExecutionTrace& right);

/// Co-simulates the statechart network and its transformed timed network
/// under each schedule and compares the traces. Equivalent only when every
/// schedule agrees. A run that fails on the timed side (ambiguous slot,
/// missing edge, invariant overrun) counts as a divergence, carrying the
/// error as its message. `jobs` > 1 splits the schedules across threads;
/// the verdict and the reported divergence do not depend on the split.
EquivalenceReport check_model_equivalence(const StatechartNetwork& net,
                                          const TimedAutomatonNetwork& ta,
                                          const TransformMap& map,
                                          const std::vector<EventEnv>& schedules,
                                          int horizon, int jobs = 1);

/// Seeded schedule generator: each declared event is broadcast in each cycle
/// with probability 3/10, drawn from a fixed-sequence generator so the same
/// seed reproduces the same schedules everywhere.
std::vector<EventEnv> random_schedules(const std::set<std::string>& events,
                                       std::uint64_t seed, int count,
                                       int horizon);

std::string render_status(const SystemStatus& status);
std::string equivalence_report_to_text(const EquivalenceReport& report);

}  // namespace scforge
