#pragma once

#include "scforge/sc_semantics.hpp"

namespace scforge {

// ---------------------------------------------------------------------------
// Safety properties
// ---------------------------------------------------------------------------

/// An always-invariant of the shape `A[] <chart>.<state> imply <expr>`:
/// whenever the chart occupies the state, the expression must hold.
struct SafetyProperty {
  std::string name;            // P1, P2, ... or an explicit `name:` prefix
  std::string chart;
  std::string state;
  Expr condition;              // over valued variables only
  std::string condition_text;  // the formula exactly as written, for exports
};

/// Reads one property per line; `//` comments and blank lines are skipped.
/// Lines read `A[] Chart.State imply <expr>`, optionally prefixed with
/// `<name>:`. Unnamed properties are numbered P1, P2, ... by position.
/// Unknown charts, states or variables are reported as diagnostics.
std::vector<SafetyProperty> parse_properties(const std::string& text,
                                             const StatechartNetwork& net,
                                             std::vector<Diagnostic>& diags);

/// One property per line in the file syntax above (names as `// name` comment
/// lines), reproducing each formula exactly as it was written.
std::string properties_to_text(const std::vector<SafetyProperty>& props);

// ---------------------------------------------------------------------------
// Bounded exhaustive exploration
// ---------------------------------------------------------------------------

struct VerifyError : std::runtime_error {
  std::string code;
  VerifyError(std::string c, const std::string& msg);
};
// codes:
//   UNBOUNDED_VARIABLE            exploration needs finite domains
//   STATE_SPACE_BUDGET_EXCEEDED   node budget hit before a fixpoint
//   ALPHABET_TOO_LARGE            more than 20 events to branch over

struct VerifyOptions {
  std::size_t node_budget = 2'000'000;  // distinct cycle-start nodes expanded
};

/// Every system status observable in any micro step of any run of up to
/// `max_cycles` macro-cycles, where the environment may broadcast any subset
/// of `alphabet` each cycle. Breadth-first with deduplication of cycle-start
/// nodes; stops early when no new node appears.
std::set<SystemStatus> reachable(const StatechartNetwork& net, int max_cycles,
                                 const std::set<std::string>& alphabet,
                                 const VerifyOptions& opts = {});

struct Counterexample {
  std::string property;
  EventEnv schedule;     // drives the run below
  ExecutionTrace trace;  // prefix ending in the violating status
};

struct VerifyResult {
  bool holds = true;
  std::optional<Counterexample> counterexample;
  std::size_t nodes_expanded = 0;
  std::size_t statuses_seen = 0;
};

/// Exhaustive bounded check of one property. A returned counterexample is
/// the shortest one in exploration order and has been replayed through the
/// interpreter: its trace really ends in a status where the chart occupies
/// the state and the condition is false.
VerifyResult check_invariant(const StatechartNetwork& net,
                             const SafetyProperty& prop, int max_cycles,
                             const VerifyOptions& opts = {});

std::string counterexample_to_text(const Counterexample& cex);

}  // namespace scforge
