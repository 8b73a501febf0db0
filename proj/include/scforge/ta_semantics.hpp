#pragma once

#include "scforge/sc_semantics.hpp"
#include "scforge/transform.hpp"

namespace scforge {

// ---------------------------------------------------------------------------
// Status
// ---------------------------------------------------------------------------

struct TAStatus {
  std::map<std::string, std::string> locations;  // automaton name -> location
  Valuation vars;                                // ints and bools, incl. alpha
  ClockValuation clocks;

  bool operator==(const TAStatus&) const = default;
};

TAStatus ta_initial_status(const TimedAutomatonNetwork& ta);

// ---------------------------------------------------------------------------
// Errors and static validation
// ---------------------------------------------------------------------------

struct TaRunError : std::runtime_error {
  std::string code;
  TaRunError(std::string c, const std::string& msg);
};
// codes:
//   TA_RAW_ATOM      event/trigger atom left in a guard (channel rules skipped)
//   TA_NO_LOCKSTEP   no lockstep index (scheduling rule skipped)
//   TA_BAD_AUX       malformed timer automaton
//   TA_BAD_SYNC      send atom on a transformed edge / receive without sender
//   AMBIGUOUS_STEP   two edges eligible in one lockstep slot
//   NO_ELIGIBLE_EDGE no edge eligible in a lockstep slot
//   INVARIANT_VIOLATION  a delay would overrun a location invariant

/// Checks that the network is executable under the lockstep driver. The
/// diagnostics carry the codes above.
std::vector<Diagnostic> ta_validate(const TimedAutomatonNetwork& ta);

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

enum class TaEntryKind { Init, Step, Aux, Delay };

struct TaTraceEntry {
  TaEntryKind kind = TaEntryKind::Init;
  TAStatus status;
  std::string label;  // "Y1.t3", "Y1.self_s1", "tick_after5s", "delay 1"
};

struct TaTrace {
  std::vector<TaTraceEntry> entries;  // entries[0] is the Init entry
  int lockstep_n = 0;
};

/// Runs `horizon` rounds of the lockstep schedule. Each round: one slot per
/// transformed automaton (exactly one eligible edge fires per slot; a
/// receive also fires its sender, receiver action first), then every due but
/// unconsumed timer fires alone, then all clocks advance one unit. Throws
/// TaRunError when the network is invalid or a slot has no or several
/// eligible edges.
TaTrace ta_run(const TimedAutomatonNetwork& ta, const EventEnv& env, int horizon);

/// Text dump: `cycle.slot | (locations) | vars | clocks | label` with `a`
/// rows for solo timer fires and `d` rows for delays. Locations print in
/// network order.
std::string dump_ta_trace(const TimedAutomatonNetwork& ta, const TaTrace& trace);

}  // namespace scforge
