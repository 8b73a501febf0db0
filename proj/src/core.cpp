#include "scforge/core.hpp"

#include <sstream>

namespace scforge {

bool is_valued(VarKind kind) {
  switch (kind) {
    case VarKind::BoundedInt:
    case VarKind::UnboundedInt:
    case VarKind::Bool:
      return true;
    case VarKind::Event:
    case VarKind::Channel:
    case VarKind::Clock:
      return false;
  }
  return false;
}

const VarDecl* find_var(const std::vector<VarDecl>& decls, const std::string& name) {
  for (const auto& d : decls) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

Valuation initial_valuation(const std::vector<VarDecl>& decls) {
  Valuation v;
  for (const auto& d : decls) {
    if (is_valued(d.kind)) v.values[d.name] = d.initial;
  }
  return v;
}

// --- Expr construction ------------------------------------------------------

namespace {
Expr wrap(ExprNode&& n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }
}  // namespace

Expr::Expr() : ptr_(std::make_shared<const ExprNode>(ExprNode{BoolLit{true}})) {}
Expr::Expr(ExprPtr node) : ptr_(std::move(node)) {}

Expr Expr::int_lit(std::int64_t v) { return wrap(ExprNode{IntLit{v}}); }
Expr Expr::bool_lit(bool v) { return wrap(ExprNode{BoolLit{v}}); }
Expr Expr::var(std::string name) { return wrap(ExprNode{VarRef{std::move(name)}}); }
Expr Expr::event(std::string name) { return wrap(ExprNode{EventRef{std::move(name)}}); }
Expr Expr::chan_recv(std::string channel) {
  return wrap(ExprNode{ChanRecv{std::move(channel)}});
}
Expr Expr::chan_send(std::string channel) {
  return wrap(ExprNode{ChanSend{std::move(channel)}});
}
Expr Expr::trigger(TriggerKind kind, std::int64_t amount, int occurrence) {
  return wrap(ExprNode{TriggerRef{kind, amount, occurrence}});
}
Expr Expr::cmp(CmpOp op, Expr lhs, Expr rhs) {
  return wrap(ExprNode{Compare{op, std::move(lhs), std::move(rhs)}});
}
Expr Expr::arith(ArithOp op, Expr lhs, Expr rhs) {
  return wrap(ExprNode{Arith{op, std::move(lhs), std::move(rhs)}});
}
Expr Expr::land(Expr lhs, Expr rhs) {
  return wrap(ExprNode{LogicalAnd{std::move(lhs), std::move(rhs)}});
}
Expr Expr::lor(Expr lhs, Expr rhs) {
  return wrap(ExprNode{LogicalOr{std::move(lhs), std::move(rhs)}});
}
Expr Expr::lnot(Expr operand) { return wrap(ExprNode{LogicalNot{std::move(operand)}}); }

// --- Structural helpers -----------------------------------------------------

bool expr_equal(const Expr& a, const Expr& b) {
  const auto& na = a.node().node;
  const auto& nb = b.node().node;
  if (na.index() != nb.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(nb);
        if constexpr (std::is_same_v<T, IntLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, EventRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, ChanRecv>) {
          return x.channel == y.channel;
        } else if constexpr (std::is_same_v<T, ChanSend>) {
          return x.channel == y.channel;
        } else if constexpr (std::is_same_v<T, TriggerRef>) {
          return x.kind == y.kind && x.amount == y.amount && x.occurrence == y.occurrence;
        } else if constexpr (std::is_same_v<T, Compare>) {
          return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Arith>) {
          return x.op == y.op && expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, LogicalAnd>) {
          return expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, LogicalOr>) {
          return expr_equal(x.lhs, y.lhs) && expr_equal(x.rhs, y.rhs);
        } else {
          return expr_equal(x.operand, std::get<LogicalNot>(nb).operand);
        }
      },
      na);
}

std::vector<Expr> top_conjuncts(const Expr& e) {
  std::vector<Expr> out;
  if (const auto* conj = std::get_if<LogicalAnd>(&e.node().node)) {
    auto lhs = top_conjuncts(conj->lhs);
    auto rhs = top_conjuncts(conj->rhs);
    out.insert(out.end(), lhs.begin(), lhs.end());
    out.insert(out.end(), rhs.begin(), rhs.end());
  } else {
    out.push_back(e);
  }
  return out;
}

namespace {

template <typename Fn>
void walk_expr(const Expr& e, Fn&& fn) {
  fn(e);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, Arith> ||
                      std::is_same_v<T, LogicalAnd> || std::is_same_v<T, LogicalOr>) {
          walk_expr(x.lhs, fn);
          walk_expr(x.rhs, fn);
        } else if constexpr (std::is_same_v<T, LogicalNot>) {
          walk_expr(x.operand, fn);
        }
      },
      e.node().node);
}

}  // namespace

std::set<std::string> referenced_names(const Expr& e) {
  std::set<std::string> out;
  walk_expr(e, [&](const Expr& sub) {
    if (const auto* v = std::get_if<VarRef>(&sub.node().node)) out.insert(v->name);
  });
  return out;
}

std::set<std::string> referenced_channels(const Expr& e) {
  std::set<std::string> out;
  walk_expr(e, [&](const Expr& sub) {
    if (const auto* r = std::get_if<ChanRecv>(&sub.node().node)) out.insert(r->channel);
    if (const auto* s = std::get_if<ChanSend>(&sub.node().node)) out.insert(s->channel);
  });
  return out;
}

std::set<int> referenced_trigger_occurrences(const Expr& e) {
  std::set<int> out;
  walk_expr(e, [&](const Expr& sub) {
    if (const auto* t = std::get_if<TriggerRef>(&sub.node().node))
      out.insert(t->occurrence);
  });
  return out;
}

Expr rewrite_expr(const Expr& e, const ExprRewriter& rw) {
  return std::visit(
      [&](const auto& x) -> Expr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, EventRef>) {
          return rw.on_event ? rw.on_event(x) : e;
        } else if constexpr (std::is_same_v<T, TriggerRef>) {
          return rw.on_trigger ? rw.on_trigger(x) : e;
        } else if constexpr (std::is_same_v<T, Compare>) {
          return Expr::cmp(x.op, rewrite_expr(x.lhs, rw), rewrite_expr(x.rhs, rw));
        } else if constexpr (std::is_same_v<T, Arith>) {
          return Expr::arith(x.op, rewrite_expr(x.lhs, rw), rewrite_expr(x.rhs, rw));
        } else if constexpr (std::is_same_v<T, LogicalAnd>) {
          return Expr::land(rewrite_expr(x.lhs, rw), rewrite_expr(x.rhs, rw));
        } else if constexpr (std::is_same_v<T, LogicalOr>) {
          return Expr::lor(rewrite_expr(x.lhs, rw), rewrite_expr(x.rhs, rw));
        } else if constexpr (std::is_same_v<T, LogicalNot>) {
          return Expr::lnot(rewrite_expr(x.operand, rw));
        } else {
          return e;
        }
      },
      e.node().node);
}

// --- Actions ----------------------------------------------------------------

ActionSeq ActionSeq::concat(const ActionSeq& a, const ActionSeq& b) {
  ActionSeq out = a;
  out.items.insert(out.items.end(), b.items.begin(), b.items.end());
  return out;
}

bool actions_equal(const ActionSeq& a, const ActionSeq& b) {
  if (a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    const auto& x = a.items[i];
    const auto& y = b.items[i];
    if (x.index() != y.index()) return false;
    if (const auto* ax = std::get_if<AssignAction>(&x)) {
      const auto& ay = std::get<AssignAction>(y);
      if (ax->var != ay.var || !expr_equal(ax->value, ay.value)) return false;
    } else if (const auto* cx = std::get_if<ClockResetAction>(&x)) {
      if (cx->clock != std::get<ClockResetAction>(y).clock) return false;
    } else {
      const auto& ix = std::get<IncAlphaAction>(x);
      const auto& iy = std::get<IncAlphaAction>(y);
      if (ix.var != iy.var || ix.modulus != iy.modulus) return false;
    }
  }
  return true;
}

// --- Evaluation ---------------------------------------------------------------

GuardContext GuardContext::none() { return GuardContext{}; }

GuardContext GuardContext::statechart(std::set<std::string> events,
                                      std::set<int> ticking) {
  GuardContext ctx;
  ctx.events = std::move(events);
  ctx.ticking = std::move(ticking);
  ctx.sc_atoms_allowed = true;
  return ctx;
}

GuardContext GuardContext::timed(std::set<std::string> offers) {
  GuardContext ctx;
  ctx.offers = std::move(offers);
  ctx.chan_atoms_allowed = true;
  return ctx;
}

EvalError::EvalError(std::string c, const std::string& msg)
    : std::runtime_error(msg), code(std::move(c)) {}

DomainOverflowError::DomainOverflowError(std::string v, std::int64_t val,
                                         const std::string& msg)
    : std::runtime_error(msg), var(std::move(v)), value(val) {}

namespace {

std::int64_t as_int(const Value& v, const char* what) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw EvalError("TypeMismatch", std::string(what) + ": expected an integer");
}

bool as_bool(const Value& v, const char* what) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw EvalError("TypeMismatch", std::string(what) + ": expected a boolean");
}

}  // namespace

Value eval_expr(const Expr& e, const Valuation& vars, const GuardContext& ctx,
                const ClockValuation* clocks) {
  return std::visit(
      [&](const auto& x) -> Value {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          auto it = vars.values.find(x.name);
          if (it != vars.values.end()) return it->second;
          if (clocks) {
            auto c = clocks->find(x.name);
            if (c != clocks->end()) return c->second;
          }
          throw EvalError("UnboundVariable", "unbound variable '" + x.name + "'");
        } else if constexpr (std::is_same_v<T, EventRef>) {
          if (!ctx.sc_atoms_allowed)
            throw EvalError("TypeMismatch",
                            "event atom '" + x.name + "' is not executable here");
          return ctx.events.count(x.name) > 0;
        } else if constexpr (std::is_same_v<T, TriggerRef>) {
          if (!ctx.sc_atoms_allowed)
            throw EvalError("TypeMismatch", "timing trigger is not executable here");
          return ctx.ticking.count(x.occurrence) > 0;
        } else if constexpr (std::is_same_v<T, ChanRecv>) {
          if (!ctx.chan_atoms_allowed)
            throw EvalError("TypeMismatch",
                            "channel atom '" + x.channel + "?' is not executable here");
          return ctx.offers.count(x.channel) > 0;
        } else if constexpr (std::is_same_v<T, ChanSend>) {
          throw EvalError("TypeMismatch",
                          "channel send '" + x.channel + "!' cannot be evaluated");
        } else if constexpr (std::is_same_v<T, Compare>) {
          std::int64_t l = as_int(eval_expr(x.lhs, vars, ctx, clocks), "comparison");
          std::int64_t r = as_int(eval_expr(x.rhs, vars, ctx, clocks), "comparison");
          switch (x.op) {
            case CmpOp::Lt: return l < r;
            case CmpOp::Le: return l <= r;
            case CmpOp::Eq: return l == r;
            case CmpOp::Ge: return l >= r;
            case CmpOp::Gt: return l > r;
            case CmpOp::Ne: return l != r;
          }
          return false;
        } else if constexpr (std::is_same_v<T, Arith>) {
          std::int64_t l = as_int(eval_expr(x.lhs, vars, ctx, clocks), "arithmetic");
          std::int64_t r = as_int(eval_expr(x.rhs, vars, ctx, clocks), "arithmetic");
          switch (x.op) {
            case ArithOp::Add: return l + r;
            case ArithOp::Sub: return l - r;
            case ArithOp::Mul: return l * r;
            case ArithOp::Div:
              if (r == 0) throw EvalError("DivisionByZero", "division by zero");
              return l / r;
          }
          return std::int64_t{0};
        } else if constexpr (std::is_same_v<T, LogicalAnd>) {
          if (!as_bool(eval_expr(x.lhs, vars, ctx, clocks), "&&")) return false;
          return as_bool(eval_expr(x.rhs, vars, ctx, clocks), "&&");
        } else if constexpr (std::is_same_v<T, LogicalOr>) {
          if (as_bool(eval_expr(x.lhs, vars, ctx, clocks), "||")) return true;
          return as_bool(eval_expr(x.rhs, vars, ctx, clocks), "||");
        } else {
          return !as_bool(eval_expr(x.operand, vars, ctx, clocks), "!");
        }
      },
      e.node().node);
}

bool eval_bool(const Expr& e, const Valuation& vars, const GuardContext& ctx,
               const ClockValuation* clocks) {
  return as_bool(eval_expr(e, vars, ctx, clocks), "guard");
}

Valuation apply_actions(const ActionSeq& seq, const Valuation& vars,
                        const std::vector<VarDecl>& decls, ClockValuation* clocks) {
  Valuation out = vars;
  const GuardContext ctx = GuardContext::none();
  for (const auto& item : seq.items) {
    if (const auto* assign = std::get_if<AssignAction>(&item)) {
      const VarDecl* decl = find_var(decls, assign->var);
      if (decl == nullptr || !is_valued(decl->kind))
        throw EvalError("UnboundVariable",
                        "assignment to undeclared variable '" + assign->var + "'");
      Value v = eval_expr(assign->value, out, ctx, clocks);
      if (decl->kind == VarKind::Bool) {
        if (!std::holds_alternative<bool>(v))
          throw EvalError("TypeMismatch",
                          "assigning an integer to boolean '" + assign->var + "'");
      } else {
        std::int64_t iv = as_int(v, "assignment");
        if (decl->kind == VarKind::BoundedInt && (iv < decl->lo || iv > decl->hi))
          throw DomainOverflowError(
              assign->var, iv,
              "value " + std::to_string(iv) + " leaves domain [" +
                  std::to_string(decl->lo) + ", " + std::to_string(decl->hi) +
                  "] of '" + assign->var + "'");
      }
      out.values[assign->var] = v;
    } else if (const auto* reset = std::get_if<ClockResetAction>(&item)) {
      if (clocks == nullptr)
        throw EvalError("TypeMismatch",
                        "clock reset '" + reset->clock + "' outside a timed context");
      (*clocks)[reset->clock] = 0;
    } else {
      const auto& inc = std::get<IncAlphaAction>(item);
      auto it = out.values.find(inc.var);
      if (it == out.values.end())
        throw EvalError("UnboundVariable", "unbound index variable '" + inc.var + "'");
      std::int64_t v = as_int(it->second, "index update");
      it->second = (v % inc.modulus) + 1;
    }
  }
  return out;
}

// --- Rendering ----------------------------------------------------------------

namespace {

// Higher binds tighter. LogicalNot always parenthesizes its operand, so it
// never needs parentheses itself.
int precedence_of(const ExprNode& n) {
  return std::visit(
      [](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LogicalOr>) return 1;
        else if constexpr (std::is_same_v<T, LogicalAnd>) return 2;
        else if constexpr (std::is_same_v<T, Compare>) return 3;
        else if constexpr (std::is_same_v<T, Arith>)
          return (x.op == ArithOp::Add || x.op == ArithOp::Sub) ? 4 : 5;
        else return 6;
      },
      n.node);
}

std::string cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

std::string arith_text(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
  }
  return "?";
}

std::string render_child(const Expr& child, int parent_prec, ExprStyle style) {
  std::string text = render_expr(child, style);
  if (precedence_of(child.node()) < parent_prec) return "(" + text + ")";
  return text;
}

}  // namespace

std::string render_expr(const Expr& e, ExprStyle style) {
  const bool spaced = style == ExprStyle::Spaced;
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return std::to_string(x.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, EventRef>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, ChanRecv>) {
          return x.channel + "?";
        } else if constexpr (std::is_same_v<T, ChanSend>) {
          return x.channel + "!";
        } else if constexpr (std::is_same_v<T, TriggerRef>) {
          return std::string(x.kind == TriggerKind::After ? "after " : "every ") +
                 std::to_string(x.amount) + "s";
        } else if constexpr (std::is_same_v<T, Compare>) {
          const int prec = 3;
          std::string op = cmp_text(x.op);
          std::string sep = spaced ? " " : "";
          return render_child(x.lhs, prec + 1, style) + sep + op + sep +
                 render_child(x.rhs, prec + 1, style);
        } else if constexpr (std::is_same_v<T, Arith>) {
          const int prec = (x.op == ArithOp::Add || x.op == ArithOp::Sub) ? 4 : 5;
          std::string sep = spaced ? " " : "";
          return render_child(x.lhs, prec, style) + sep + arith_text(x.op) + sep +
                 render_child(x.rhs, prec + 1, style);
        } else if constexpr (std::is_same_v<T, LogicalAnd>) {
          return render_child(x.lhs, 2, style) + " && " + render_child(x.rhs, 2, style);
        } else if constexpr (std::is_same_v<T, LogicalOr>) {
          return render_child(x.lhs, 1, style) + " || " + render_child(x.rhs, 1, style);
        } else {
          return "!(" + render_expr(x.operand, style) + ")";
        }
      },
      e.node().node);
}

std::string render_action_item(const ActionItem& item, ExprStyle style) {
  const char* eq = style == ExprStyle::Spaced ? " = " : "=";
  if (const auto* assign = std::get_if<AssignAction>(&item))
    return assign->var + eq + render_expr(assign->value, style);
  if (const auto* reset = std::get_if<ClockResetAction>(&item))
    return reset->clock + eq + "0";
  const auto& inc = std::get<IncAlphaAction>(item);
  if (style == ExprStyle::Spaced)
    return inc.var + " = " + inc.var + " % " + std::to_string(inc.modulus) + " + 1";
  return "Inc(" + inc.var + ")";
}

std::string render_actions(const ActionSeq& seq, ExprStyle style) {
  const char* sep = style == ExprStyle::Spaced ? ", " : "; ";
  std::string out;
  for (std::size_t i = 0; i < seq.items.size(); ++i) {
    if (i) out += sep;
    out += render_action_item(seq.items[i], style);
  }
  return out;
}

std::string render_value(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(v));
}

}  // namespace scforge
