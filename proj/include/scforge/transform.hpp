#pragma once

#include "scforge/parser.hpp"

namespace scforge {

// ---------------------------------------------------------------------------
// Timed-automaton network model
// ---------------------------------------------------------------------------

/// Upper-bound location invariant `clock <= bound`.
struct ClockConstraint {
  std::string clock;
  std::int64_t bound = 0;

  bool operator==(const ClockConstraint&) const = default;
};

struct LocationDef {
  std::string id;
  std::optional<ClockConstraint> invariant;
};

struct EdgeDef {
  std::string id;
  std::string source;
  std::string target;
  Expr guard;  // channel atoms live in the guard; export lifts one to a sync label
  ActionSeq action;
  std::vector<std::string> clock_resets;
};

enum class AutomatonRole {
  Transformed,  // image of a statechart
  EventAux,     // one-location broadcaster for an event channel
  TimerAux,     // clock automaton for a trigger occurrence
};

struct TimedAutomatonDef {
  std::string name;
  AutomatonRole role = AutomatonRole::Transformed;
  int rho = 0;  // source chart priority; 0 for aux automata
  std::vector<LocationDef> locations;
  std::string initial;
  std::vector<EdgeDef> edges;

  const LocationDef* find_location(const std::string& id) const;
  std::vector<const EdgeDef*> outgoing(const std::string& location) const;
};

struct TimedAutomatonNetwork {
  std::vector<VarDecl> variables;  // valued vars, channels, clocks, then alpha
  std::vector<TimedAutomatonDef> automata;
  int stage = 0;          // highest rule applied so far (1..7)
  int lockstep_n = 0;     // number of transformed automata; 0 before stage 7
  std::string alpha_var;  // "" before stage 7

  const TimedAutomatonDef* find_automaton(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Transformation bookkeeping
// ---------------------------------------------------------------------------

/// Where every statechart construct went. Chart/state maps are bijections
/// onto the transformed automata; transition and variable maps are injective
/// but not surjective (self-loops, channels, clocks and the lockstep index
/// have no preimage).
struct TransformMap {
  std::map<std::string, std::string> chart_to_automaton;
  std::map<std::string, std::string> state_to_location;    // "Y1.s1" -> "Y1.s1"
  std::map<std::string, std::string> transition_to_edge;   // "Y1.t3" -> "Y1.t3"
  std::map<std::string, std::string> variable_map;
  std::map<std::string, std::string> event_channel;
  std::map<int, std::string> occurrence_channel;
  std::map<int, std::string> occurrence_clock;
};

struct TransformOptions {
  int stage = 7;       // apply rules 1..stage
  std::set<int> skip;  // rules 2..7 may be skipped (expert/testing hook)
};

struct TransformResult {
  TimedAutomatonNetwork ta;
  TransformMap map;
};

/// Applies the transformation rules in order. The input must validate.
TransformResult transform_network(const StatechartNetwork& net,
                                  const TransformOptions& opts = {});

/// Canonical text dump of a TA network (used for golden comparisons).
std::string dump_ta_network(const TimedAutomatonNetwork& ta);

// ---------------------------------------------------------------------------
// Sync derivation
// ---------------------------------------------------------------------------

enum class SyncKind { None, Send, Receive };

struct EdgeSync {
  SyncKind kind = SyncKind::None;
  std::string channel;
};

/// First channel atom among the top-level conjuncts of the guard, if any.
EdgeSync edge_sync(const EdgeDef& edge);

/// The guard with that one lifted channel conjunct removed (literal true if
/// nothing else remains). Channel atoms elsewhere stay put.
Expr guard_without_sync(const EdgeDef& edge);

/// Channel atoms that the XML exporter cannot turn into a sync label: any
/// under a negation/disjunction, and every one beyond the first conjunct.
std::vector<std::string> unexportable_channel_atoms(const EdgeDef& edge);

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

/// Verifies the bookkeeping maps: charts and states map bijectively onto the
/// transformed automata and their locations; transitions map injectively and
/// (from stage 7 on) not surjectively; source variables keep their names and
/// every unmapped TA variable is a channel, a clock or the lockstep index.
std::vector<Diagnostic> check_map_lemmas(const StatechartNetwork& net,
                                         const TimedAutomatonNetwork& ta,
                                         const TransformMap& map);

/// After stage 6: for every location, at most one original outgoing edge is
/// enabled under any valuation of the location's referenced bounded
/// variables and any subset of channel offers.
std::vector<Diagnostic> check_guard_exclusivity(const TimedAutomatonNetwork& ta);

/// After stage 7: for every location of a transformed automaton, exactly one
/// outgoing edge (original or self-loop) is enabled when alpha matches, and
/// none otherwise.
std::vector<Diagnostic> check_lockstep_totality(const TimedAutomatonNetwork& ta);

}  // namespace scforge
