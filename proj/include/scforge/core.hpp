#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace scforge {

// ---------------------------------------------------------------------------
// Values and variable declarations
// ---------------------------------------------------------------------------

using Value = std::variant<std::int64_t, bool>;

enum class VarKind {
  BoundedInt,    // int with inclusive [lo, hi] domain
  UnboundedInt,  // int without domain; simulation only, verification rejects
  Bool,
  Event,    // statechart-side broadcast event (no value)
  Channel,  // TA-side synchronization channel (no value)
  Clock,    // TA-side non-negative integer clock
};

/// True for kinds that carry a value in a Valuation (ints and bools).
bool is_valued(VarKind kind);

struct VarDecl {
  std::string name;
  VarKind kind = VarKind::BoundedInt;
  std::int64_t lo = 0;  // BoundedInt only
  std::int64_t hi = 0;
  Value initial = std::int64_t{0};

  bool operator==(const VarDecl&) const = default;
};

const VarDecl* find_var(const std::vector<VarDecl>& decls, const std::string& name);

/// Total map from valued variable names to current values.
struct Valuation {
  std::map<std::string, Value> values;

  bool operator==(const Valuation&) const = default;
  bool operator<(const Valuation& o) const { return values < o.values; }
};

/// Build the initial valuation (declared initial values) for all valued kinds.
Valuation initial_valuation(const std::vector<VarDecl>& decls);

using ClockValuation = std::map<std::string, std::int64_t>;

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class CmpOp { Lt, Le, Eq, Ge, Gt, Ne };
enum class ArithOp { Add, Sub, Mul, Div };
enum class TriggerKind { After, Every };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

/// Immutable expression tree with cheap value-semantics copies. Default
/// constructed Expr is the literal `true`.
class Expr {
 public:
  Expr();
  explicit Expr(ExprPtr node);

  static Expr int_lit(std::int64_t v);
  static Expr bool_lit(bool v);
  static Expr var(std::string name);
  static Expr event(std::string name);
  static Expr chan_recv(std::string channel);
  static Expr chan_send(std::string channel);
  static Expr trigger(TriggerKind kind, std::int64_t amount, int occurrence);
  static Expr cmp(CmpOp op, Expr lhs, Expr rhs);
  static Expr arith(ArithOp op, Expr lhs, Expr rhs);
  static Expr land(Expr lhs, Expr rhs);
  static Expr lor(Expr lhs, Expr rhs);
  static Expr lnot(Expr operand);

  const ExprNode& node() const { return *ptr_; }
  const ExprPtr& ptr() const { return ptr_; }

 private:
  ExprPtr ptr_;
};

struct IntLit {
  std::int64_t value;
};
struct BoolLit {
  bool value;
};
struct VarRef {
  std::string name;
};
struct EventRef {
  std::string name;
};
struct ChanRecv {
  std::string channel;
};
struct ChanSend {
  std::string channel;
};
struct TriggerRef {
  TriggerKind kind;
  std::int64_t amount;  // whole time units (cycles at unit period)
  int occurrence;       // unique per syntactic occurrence, network-wide
};
struct Compare {
  CmpOp op;
  Expr lhs, rhs;
};
struct Arith {
  ArithOp op;
  Expr lhs, rhs;
};
struct LogicalAnd {
  Expr lhs, rhs;
};
struct LogicalOr {
  Expr lhs, rhs;
};
struct LogicalNot {
  Expr operand;
};

struct ExprNode {
  std::variant<IntLit, BoolLit, VarRef, EventRef, ChanRecv, ChanSend, TriggerRef,
               Compare, Arith, LogicalAnd, LogicalOr, LogicalNot>
      node;
};

bool expr_equal(const Expr& a, const Expr& b);

/// Collects, in traversal order, the top-level conjuncts of a guard
/// (descending through LogicalAnd only).
std::vector<Expr> top_conjuncts(const Expr& e);

/// Names of variables/clocks referenced anywhere in the expression.
std::set<std::string> referenced_names(const Expr& e);
std::set<std::string> referenced_channels(const Expr& e);
std::set<int> referenced_trigger_occurrences(const Expr& e);

/// Rebuilds the expression with every EventRef / TriggerRef / ChanRecv /
/// ChanSend rewritten through the supplied hooks (identity when a hook is
/// empty). Used by the transformation rules and occurrence renumbering.
struct ExprRewriter {
  std::function<Expr(const EventRef&)> on_event;
  std::function<Expr(const TriggerRef&)> on_trigger;
};
Expr rewrite_expr(const Expr& e, const ExprRewriter& rw);

// ---------------------------------------------------------------------------
// Actions
// ---------------------------------------------------------------------------

struct AssignAction {
  std::string var;
  Expr value;
};
struct ClockResetAction {
  std::string clock;
};
/// Lockstep index bump: alpha = alpha % modulus + 1 (stays in 1..modulus).
struct IncAlphaAction {
  std::string var;
  int modulus;
};

using ActionItem = std::variant<AssignAction, ClockResetAction, IncAlphaAction>;

struct ActionSeq {
  std::vector<ActionItem> items;

  bool empty() const { return items.empty(); }
  static ActionSeq concat(const ActionSeq& a, const ActionSeq& b);
};

bool actions_equal(const ActionSeq& a, const ActionSeq& b);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Ambient facts a guard may consult beyond the valuation. The statechart
/// side populates events/ticking; the TA side populates offers. Atom kinds
/// not enabled here make eval_expr throw (e.g. a raw event atom is not
/// executable in a timed automaton).
struct GuardContext {
  std::set<std::string> events;  // events present this cycle
  std::set<int> ticking;         // trigger occurrences ticking this cycle
  std::set<std::string> offers;  // channels offered this cycle
  bool sc_atoms_allowed = false;
  bool chan_atoms_allowed = false;

  static GuardContext none();
  static GuardContext statechart(std::set<std::string> events, std::set<int> ticking);
  static GuardContext timed(std::set<std::string> offers);
};

struct EvalError : std::runtime_error {
  std::string code;  // "UnboundVariable" | "TypeMismatch" | "DivisionByZero" | ...
  EvalError(std::string c, const std::string& msg);
};

struct DomainOverflowError : std::runtime_error {
  std::string var;
  std::int64_t value;
  DomainOverflowError(std::string v, std::int64_t val, const std::string& msg);
};

Value eval_expr(const Expr& e, const Valuation& vars, const GuardContext& ctx,
                const ClockValuation* clocks = nullptr);

bool eval_bool(const Expr& e, const Valuation& vars, const GuardContext& ctx,
               const ClockValuation* clocks = nullptr);

/// Applies the items left to right against a working copy, so later
/// assignments observe earlier ones. Bounded targets are checked against
/// their domain after every assignment. Clock resets require `clocks`.
Valuation apply_actions(const ActionSeq& seq, const Valuation& vars,
                        const std::vector<VarDecl>& decls,
                        ClockValuation* clocks = nullptr);

// ---------------------------------------------------------------------------
// Statuses and traces (statechart side)
// ---------------------------------------------------------------------------

/// Global status of a statechart network: one active state per chart (in
/// priority order), the shared valuation, and the execution index alpha.
struct SystemStatus {
  std::vector<std::string> states;
  Valuation vars;
  int exec_index = 1;

  bool operator==(const SystemStatus&) const = default;
  bool operator<(const SystemStatus& o) const {
    if (states != o.states) return states < o.states;
    if (!(vars == o.vars)) return vars < o.vars;
    return exec_index < o.exec_index;
  }
};

inline const char* kStutterLabel = "STUTTER";

struct ExecutionTrace {
  std::vector<SystemStatus> statuses;  // statuses[0] is the initial status
  std::vector<std::string> labels;     // labels[k] produced statuses[k+1]
  int charts = 0;                      // micro-steps per cycle

  std::size_t cycles() const {
    return charts == 0 ? 0 : labels.size() / static_cast<std::size_t>(charts);
  }
};

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

enum class ExprStyle {
  Compact,  // x>1 && !(x>0)        (network dumps)
  Spaced,   // x > 1 && !(x > 0)    (queries and XML labels)
};

std::string render_expr(const Expr& e, ExprStyle style);
std::string render_action_item(const ActionItem& item, ExprStyle style);
/// "x=2; x=0; x=5" (Compact) or "x = 2, x = 0, x = 5" (Spaced).
std::string render_actions(const ActionSeq& seq, ExprStyle style);
std::string render_value(const Value& v);

}  // namespace scforge
