#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scforge/core.hpp"
#include "scforge/diagnostics.hpp"

namespace scforge {

// ---------------------------------------------------------------------------
// Statechart network model
// ---------------------------------------------------------------------------

struct TransitionDef {
  std::string id;
  std::string source;
  std::string target;
  Expr guard;        // `when true` for unconditional transitions
  ActionSeq action;  // empty when the `do` block is omitted
  int priority = 1;  // gamma: unique per source state, smaller fires first
};

struct StateDef {
  std::string id;
  ActionSeq entry;
  ActionSeq exit;
};

struct StatechartDef {
  std::string name;
  int priority = 0;  // rho: position in the synchronous round
  std::vector<StateDef> states;
  std::string initial;
  std::vector<TransitionDef> transitions;

  const StateDef* find_state(const std::string& id) const;
  std::vector<const TransitionDef*> outgoing(const std::string& state) const;
};

struct StatechartNetwork {
  std::vector<VarDecl> variables;
  std::vector<StatechartDef> charts;  // sorted by priority, rho_i == i+1

  const StatechartDef* find_chart(const std::string& name) const;
  std::vector<std::string> event_names() const;
};

/// One `after`/`every` atom as it occurs in some guard. Occurrence ids are
/// dense (0..m-1) in chart/transition/guard order.
struct TriggerOccurrence {
  int id = 0;
  TriggerKind kind = TriggerKind::After;
  std::int64_t amount = 0;
  std::string chart;
  std::string transition;
};

std::vector<TriggerOccurrence> trigger_occurrences(const StatechartNetwork& net);

/// Reassigns dense occurrence ids in deterministic order. The parser does
/// this automatically; call it after building a network programmatically.
void renumber_trigger_occurrences(StatechartNetwork& net);

// ---------------------------------------------------------------------------
// Parsing / validation / printing
// ---------------------------------------------------------------------------

struct ParseResult {
  std::optional<StatechartNetwork> network;  // absent when diagnostics are fatal
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return network.has_value() && diagnostics.empty(); }
};

ParseResult parse_network(const std::string& text);

/// Structural and type checks on an already-built network: chart priorities
/// form 1..n, per-state transition priorities are unique, initial states obey
/// the single-true-transition rule, guards and actions type-check, reserved
/// names are not declared. Returns the (possibly empty) diagnostic list.
std::vector<Diagnostic> validate(const StatechartNetwork& net);

/// Canonical text form; parse_network(print_network(net)) reproduces net.
std::string print_network(const StatechartNetwork& net);

/// Parses a standalone boolean expression over the network's valued
/// variables (used by the property-file reader). Events, timing triggers and
/// channel atoms are rejected: none of them is part of a system status.
std::optional<Expr> parse_guard_text(const std::string& text,
                                     const StatechartNetwork& net,
                                     std::vector<Diagnostic>& diags);

/// Parses a timed-automaton guard: channel atoms (`ch?`, trailing `ch!`) are
/// allowed, events and timing triggers are not. Used by the XML reader.
std::optional<Expr> parse_ta_guard_text(const std::string& text,
                                        const std::vector<VarDecl>& decls,
                                        std::vector<Diagnostic>& diags);

}  // namespace scforge
