#include "scforge/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace scforge {

const StateDef* StatechartDef::find_state(const std::string& id) const {
  for (const auto& s : states) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

std::vector<const TransitionDef*> StatechartDef::outgoing(const std::string& state) const {
  std::vector<const TransitionDef*> out;
  for (const auto& t : transitions) {
    if (t.source == state) out.push_back(&t);
  }
  return out;
}

const StatechartDef* StatechartNetwork::find_chart(const std::string& name) const {
  for (const auto& c : charts) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<std::string> StatechartNetwork::event_names() const {
  std::vector<std::string> out;
  for (const auto& v : variables) {
    if (v.kind == VarKind::Event) out.push_back(v.name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trigger occurrences
// ---------------------------------------------------------------------------

std::vector<TriggerOccurrence> trigger_occurrences(const StatechartNetwork& net) {
  std::vector<TriggerOccurrence> out;
  for (const auto& chart : net.charts) {
    for (const auto& t : chart.transitions) {
      std::function<void(const Expr&)> walk = [&](const Expr& e) {
        std::visit(
            [&](const auto& x) {
              using T = std::decay_t<decltype(x)>;
              if constexpr (std::is_same_v<T, TriggerRef>) {
                out.push_back({x.occurrence, x.kind, x.amount, chart.name, t.id});
              } else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, Arith> ||
                                   std::is_same_v<T, LogicalAnd> ||
                                   std::is_same_v<T, LogicalOr>) {
                walk(x.lhs);
                walk(x.rhs);
              } else if constexpr (std::is_same_v<T, LogicalNot>) {
                walk(x.operand);
              }
            },
            e.node().node);
      };
      walk(t.guard);
    }
  }
  return out;
}

void renumber_trigger_occurrences(StatechartNetwork& net) {
  int next = 0;
  for (auto& chart : net.charts) {
    for (auto& t : chart.transitions) {
      ExprRewriter rw;
      rw.on_trigger = [&](const TriggerRef& ref) {
        return Expr::trigger(ref.kind, ref.amount, next++);
      };
      t.guard = rewrite_expr(t.guard, rw);
    }
  }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  Ident, Int, Duration,
  LBrace, RBrace, LParen, RParen, LBracket, RBracket,
  Semi, Colon, Comma, Arrow, ColonEq, Eq,
  Not, AndAnd, OrOr,
  Lt, Le, EqEq, Ge, Gt, Ne,
  Plus, Minus, Star, Slash,
  Question,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t number = 0;
  int line = 1;
  int column = 1;
};

struct Lexer {
  const std::string& src;
  std::size_t pos = 0;
  int line = 1;
  int column = 1;
  std::vector<Diagnostic>& diags;

  Lexer(const std::string& s, std::vector<Diagnostic>& d) : src(s), diags(d) {}

  char peek(std::size_t ahead = 0) const {
    return pos + ahead < src.size() ? src[pos + ahead] : '\0';
  }

  void advance() {
    if (pos < src.size()) {
      if (src[pos] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++pos;
    }
  }

  void skip_ws() {
    for (;;) {
      while (std::isspace(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '/' && peek(1) == '/') {
        while (peek() != '\n' && peek() != '\0') advance();
        continue;
      }
      if (peek() == '/' && peek(1) == '*') {
        advance();
        advance();
        while (!(peek() == '*' && peek(1) == '/') && peek() != '\0') advance();
        advance();
        advance();
        continue;
      }
      break;
    }
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Token tok;
      tok.line = line;
      tok.column = column;
      char c = peek();
      if (c == '\0') {
        tok.kind = Tok::End;
        out.push_back(tok);
        break;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
          id += peek();
          advance();
        }
        tok.kind = Tok::Ident;
        tok.text = id;
        out.push_back(tok);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::int64_t v = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          v = v * 10 + (peek() - '0');
          advance();
        }
        // "5s" is a duration literal as long as the 's' does not start a
        // longer identifier.
        if (peek() == 's' && !(std::isalnum(static_cast<unsigned char>(peek(1))) ||
                               peek(1) == '_')) {
          advance();
          tok.kind = Tok::Duration;
        } else {
          tok.kind = Tok::Int;
        }
        tok.number = v;
        out.push_back(tok);
        continue;
      }
      auto two = [&](char a, char b) { return c == a && peek(1) == b; };
      if (two('-', '>')) { tok.kind = Tok::Arrow; advance(); advance(); }
      else if (two(':', '=')) { tok.kind = Tok::ColonEq; advance(); advance(); }
      else if (two('&', '&')) { tok.kind = Tok::AndAnd; advance(); advance(); }
      else if (two('|', '|')) { tok.kind = Tok::OrOr; advance(); advance(); }
      else if (two('<', '=')) { tok.kind = Tok::Le; advance(); advance(); }
      else if (two('>', '=')) { tok.kind = Tok::Ge; advance(); advance(); }
      else if (two('=', '=')) { tok.kind = Tok::EqEq; advance(); advance(); }
      else if (two('!', '=')) { tok.kind = Tok::Ne; advance(); advance(); }
      else {
        switch (c) {
          case '{': tok.kind = Tok::LBrace; break;
          case '}': tok.kind = Tok::RBrace; break;
          case '(': tok.kind = Tok::LParen; break;
          case ')': tok.kind = Tok::RParen; break;
          case '[': tok.kind = Tok::LBracket; break;
          case ']': tok.kind = Tok::RBracket; break;
          case ';': tok.kind = Tok::Semi; break;
          case ':': tok.kind = Tok::Colon; break;
          case ',': tok.kind = Tok::Comma; break;
          case '=': tok.kind = Tok::Eq; break;
          case '!': tok.kind = Tok::Not; break;
          case '<': tok.kind = Tok::Lt; break;
          case '>': tok.kind = Tok::Gt; break;
          case '+': tok.kind = Tok::Plus; break;
          case '-': tok.kind = Tok::Minus; break;
          case '*': tok.kind = Tok::Star; break;
          case '/': tok.kind = Tok::Slash; break;
          case '?': tok.kind = Tok::Question; break;
          default:
            diags.push_back({"SYNTAX_ERROR",
                             std::string("unexpected character '") + c + "'", line,
                             column});
            advance();
            continue;
        }
        advance();
      }
      out.push_back(tok);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Expression parsing (shared by the DSL, property files and XML read-back)
// ---------------------------------------------------------------------------

struct ExprFlags {
  bool events = false;
  bool triggers = false;
  bool channels = false;
};

struct ExprParser {
  const std::vector<Token>& toks;
  std::size_t& at;
  const std::vector<VarDecl>& decls;
  ExprFlags flags;
  std::vector<Diagnostic>& diags;
  int* next_occurrence = nullptr;  // trigger occurrence counter, when allowed
  bool failed = false;

  const Token& cur() const { return toks[at]; }
  void bump() { if (cur().kind != Tok::End) ++at; }

  void error(const std::string& msg) {
    if (!failed)
      diags.push_back({"SYNTAX_ERROR", msg, cur().line, cur().column});
    failed = true;
  }

  Expr parse() { return parse_or(); }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (cur().kind == Tok::OrOr) {
      bump();
      lhs = Expr::lor(lhs, parse_and());
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_unary();
    while (cur().kind == Tok::AndAnd) {
      bump();
      lhs = Expr::land(lhs, parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (cur().kind == Tok::Not) {
      bump();
      return Expr::lnot(parse_unary());
    }
    return parse_rel();
  }

  Expr parse_rel() {
    Expr lhs = parse_sum();
    CmpOp op;
    switch (cur().kind) {
      case Tok::Lt: op = CmpOp::Lt; break;
      case Tok::Le: op = CmpOp::Le; break;
      case Tok::EqEq: op = CmpOp::Eq; break;
      case Tok::Ge: op = CmpOp::Ge; break;
      case Tok::Gt: op = CmpOp::Gt; break;
      case Tok::Ne: op = CmpOp::Ne; break;
      default: return lhs;
    }
    bump();
    return Expr::cmp(op, lhs, parse_sum());
  }

  Expr parse_sum() {
    Expr lhs = parse_term();
    for (;;) {
      if (cur().kind == Tok::Plus) {
        bump();
        lhs = Expr::arith(ArithOp::Add, lhs, parse_term());
      } else if (cur().kind == Tok::Minus) {
        bump();
        lhs = Expr::arith(ArithOp::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (cur().kind == Tok::Star) {
        bump();
        lhs = Expr::arith(ArithOp::Mul, lhs, parse_factor());
      } else if (cur().kind == Tok::Slash) {
        bump();
        lhs = Expr::arith(ArithOp::Div, lhs, parse_factor());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    const Token& t = cur();
    if (t.kind == Tok::Int) {
      bump();
      return Expr::int_lit(t.number);
    }
    if (t.kind == Tok::LParen) {
      bump();
      Expr inner = parse_or();
      if (cur().kind == Tok::RParen) bump();
      else error("expected ')'");
      return inner;
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "true") { bump(); return Expr::bool_lit(true); }
      if (t.text == "false") { bump(); return Expr::bool_lit(false); }
      if (t.text == "after" || t.text == "every") {
        TriggerKind kind = t.text == "after" ? TriggerKind::After : TriggerKind::Every;
        bump();
        if (cur().kind != Tok::Duration && cur().kind != Tok::Int) {
          error("expected a duration after '" + t.text + "'");
          return Expr::bool_lit(true);
        }
        std::int64_t amount = cur().number;
        bump();
        if (!flags.triggers) {
          error("timing triggers are not allowed in this context");
          return Expr::bool_lit(true);
        }
        int occ = next_occurrence ? (*next_occurrence)++ : 0;
        return Expr::trigger(kind, amount, occ);
      }
      bump();
      if (flags.channels && cur().kind == Tok::Question) {
        bump();
        return Expr::chan_recv(t.text);
      }
      // "ch!" only appears directly before a conjunction or the end of a
      // guard in the exporter's subset; anything else is logical negation.
      Tok after_not = at + 1 < toks.size() ? toks[at + 1].kind : Tok::End;
      if (flags.channels && cur().kind == Tok::Not &&
          (after_not == Tok::AndAnd || after_not == Tok::End ||
           after_not == Tok::RParen)) {
        bump();
        return Expr::chan_send(t.text);
      }
      const VarDecl* decl = find_var(decls, t.text);
      if (decl != nullptr && decl->kind == VarKind::Event) {
        if (!flags.events) {
          error("event '" + t.text + "' is not allowed in this context");
          return Expr::bool_lit(true);
        }
        return Expr::event(t.text);
      }
      return Expr::var(t.text);
    }
    error("expected an expression");
    bump();
    return Expr::bool_lit(true);
  }
};

// ---------------------------------------------------------------------------
// Network parser
// ---------------------------------------------------------------------------

struct NetworkParser {
  std::vector<Token> toks;
  std::size_t at = 0;
  std::vector<Diagnostic>& diags;
  StatechartNetwork net;
  int next_occurrence = 0;
  bool fatal = false;

  explicit NetworkParser(std::vector<Token> t, std::vector<Diagnostic>& d)
      : toks(std::move(t)), diags(d) {}

  const Token& cur() const { return toks[at]; }
  const Token& ahead(std::size_t n = 1) const {
    return toks[std::min(at + n, toks.size() - 1)];
  }
  void bump() { if (cur().kind != Tok::End) ++at; }

  void error(const std::string& msg) {
    diags.push_back({"SYNTAX_ERROR", msg, cur().line, cur().column});
    fatal = true;
  }

  bool expect(Tok kind, const std::string& what) {
    if (cur().kind == kind) {
      bump();
      return true;
    }
    error("expected " + what);
    return false;
  }

  bool expect_keyword(const std::string& kw) {
    if (cur().kind == Tok::Ident && cur().text == kw) {
      bump();
      return true;
    }
    error("expected '" + kw + "'");
    return false;
  }

  std::string expect_ident(const std::string& what) {
    if (cur().kind == Tok::Ident) {
      std::string id = cur().text;
      bump();
      return id;
    }
    error("expected " + what);
    return {};
  }

  std::int64_t parse_signed_int() {
    bool neg = false;
    if (cur().kind == Tok::Minus) {
      neg = true;
      bump();
    }
    if (cur().kind != Tok::Int) {
      error("expected an integer");
      return 0;
    }
    std::int64_t v = cur().number;
    bump();
    return neg ? -v : v;
  }

  Expr parse_expr(ExprFlags flags) {
    ExprParser ep{toks, at, net.variables, flags, diags, &next_occurrence};
    Expr e = ep.parse();
    if (ep.failed) fatal = true;
    return e;
  }

  ActionSeq parse_action_block() {
    ActionSeq seq;
    if (!expect(Tok::LBrace, "'{'")) return seq;
    while (cur().kind != Tok::RBrace && cur().kind != Tok::End) {
      std::string target = expect_ident("an assignment target");
      if (fatal) break;
      if (!expect(Tok::ColonEq, "':='")) break;
      Expr value = parse_expr(ExprFlags{});
      seq.items.push_back(AssignAction{target, value});
      if (!expect(Tok::Semi, "';'")) break;
    }
    expect(Tok::RBrace, "'}'");
    return seq;
  }

  void parse_var_section() {
    expect(Tok::LBrace, "'{'");
    while (cur().kind != Tok::RBrace && cur().kind != Tok::End) {
      std::string kw = expect_ident("a declaration kind (int, bool, event)");
      if (fatal) return;
      VarDecl decl;
      if (kw == "int") {
        decl.name = expect_ident("a variable name");
        expect(Tok::Eq, "'='");
        decl.initial = parse_signed_int();
        decl.kind = VarKind::UnboundedInt;
        if (cur().kind == Tok::Ident && cur().text == "in") {
          bump();
          expect(Tok::LBracket, "'['");
          decl.lo = parse_signed_int();
          expect(Tok::Comma, "','");
          decl.hi = parse_signed_int();
          expect(Tok::RBracket, "']'");
          decl.kind = VarKind::BoundedInt;
        }
      } else if (kw == "bool") {
        decl.name = expect_ident("a variable name");
        decl.kind = VarKind::Bool;
        expect(Tok::Eq, "'='");
        std::string lit = expect_ident("'true' or 'false'");
        if (lit == "true") decl.initial = true;
        else if (lit == "false") decl.initial = false;
        else error("expected 'true' or 'false'");
      } else if (kw == "event") {
        decl.name = expect_ident("an event name");
        decl.kind = VarKind::Event;
      } else {
        error("unknown declaration kind '" + kw + "'");
        return;
      }
      expect(Tok::Semi, "';'");
      if (fatal) return;
      net.variables.push_back(decl);
    }
    expect(Tok::RBrace, "'}'");
  }

  void parse_statechart() {
    StatechartDef chart;
    chart.name = expect_ident("a statechart name");
    expect_keyword("priority");
    if (cur().kind == Tok::Int) {
      chart.priority = static_cast<int>(cur().number);
      bump();
    } else {
      error("expected a priority number");
    }
    expect(Tok::LBrace, "'{'");
    while (cur().kind != Tok::RBrace && cur().kind != Tok::End && !fatal) {
      std::string kw = expect_ident("'state', 'initial' or 'transition'");
      if (kw == "state") {
        StateDef state;
        state.id = expect_ident("a state name");
        while (cur().kind == Tok::Ident &&
               (cur().text == "entry" || cur().text == "exit")) {
          bool entry = cur().text == "entry";
          bump();
          ActionSeq block = parse_action_block();
          (entry ? state.entry : state.exit) = block;
        }
        if (cur().kind == Tok::Semi) bump();
        chart.states.push_back(std::move(state));
      } else if (kw == "initial") {
        chart.initial = expect_ident("a state name");
        expect(Tok::Semi, "';'");
      } else if (kw == "transition") {
        TransitionDef t;
        t.id = expect_ident("a transition name");
        expect(Tok::Colon, "':'");
        t.source = expect_ident("a source state");
        expect(Tok::Arrow, "'->'");
        t.target = expect_ident("a target state");
        if (cur().kind == Tok::Ident && cur().text == "priority") {
          bump();
          if (cur().kind == Tok::Int) {
            t.priority = static_cast<int>(cur().number);
            bump();
          } else {
            error("expected a priority number");
          }
        }
        expect_keyword("when");
        t.guard = parse_expr(ExprFlags{.events = true, .triggers = true});
        if (cur().kind == Tok::Ident && cur().text == "do") {
          bump();
          t.action = parse_action_block();
        }
        if (cur().kind == Tok::Semi) bump();
        chart.transitions.push_back(std::move(t));
      } else {
        error("unknown statechart item '" + kw + "'");
      }
    }
    expect(Tok::RBrace, "'}'");
    net.charts.push_back(std::move(chart));
  }

  void run() {
    while (cur().kind != Tok::End && !fatal) {
      std::string kw = expect_ident("'var' or 'statechart'");
      if (fatal) break;
      if (kw == "var") parse_var_section();
      else if (kw == "statechart") parse_statechart();
      else error("unknown top-level item '" + kw + "'");
    }
  }
};

}  // namespace

ParseResult parse_network(const std::string& text) {
  ParseResult result;
  Lexer lexer(text, result.diagnostics);
  std::vector<Token> toks = lexer.run();
  if (!result.diagnostics.empty()) return result;

  NetworkParser parser(std::move(toks), result.diagnostics);
  parser.run();
  if (parser.fatal) return result;

  StatechartNetwork net = std::move(parser.net);
  std::stable_sort(net.charts.begin(), net.charts.end(),
                   [](const StatechartDef& a, const StatechartDef& b) {
                     return a.priority < b.priority;
                   });
  renumber_trigger_occurrences(net);

  auto semantic = validate(net);
  result.diagnostics.insert(result.diagnostics.end(), semantic.begin(), semantic.end());
  result.network = std::move(net);
  return result;
}

namespace {

std::optional<Expr> parse_expr_text(const std::string& text,
                                    const std::vector<VarDecl>& decls,
                                    ExprFlags flags,
                                    std::vector<Diagnostic>& diags) {
  std::size_t before = diags.size();
  Lexer lexer(text, diags);
  std::vector<Token> toks = lexer.run();
  if (diags.size() > before) return std::nullopt;
  std::size_t at = 0;
  ExprParser ep{toks, at, decls, flags, diags, nullptr};
  Expr e = ep.parse();
  if (toks[at].kind != Tok::End)
    diags.push_back({"SYNTAX_ERROR", "trailing input after expression", toks[at].line,
                     toks[at].column});
  if (ep.failed || diags.size() > before) return std::nullopt;
  return e;
}

}  // namespace

std::optional<Expr> parse_guard_text(const std::string& text,
                                     const StatechartNetwork& net,
                                     std::vector<Diagnostic>& diags) {
  return parse_expr_text(text, net.variables, ExprFlags{}, diags);
}

std::optional<Expr> parse_ta_guard_text(const std::string& text,
                                        const std::vector<VarDecl>& decls,
                                        std::vector<Diagnostic>& diags) {
  return parse_expr_text(text, decls, ExprFlags{.channels = true}, diags);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

enum class ExprType { Int, Bool, Bad };

struct TypeChecker {
  const std::vector<VarDecl>& decls;
  bool events_allowed = false;
  bool triggers_allowed = false;
  std::string where;
  std::vector<Diagnostic>& diags;

  void report(const std::string& code, const std::string& msg) {
    diags.push_back({code, where + ": " + msg, 0, 0});
  }

  ExprType check(const Expr& e) {
    return std::visit(
        [&](const auto& x) -> ExprType {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return ExprType::Int;
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return ExprType::Bool;
          } else if constexpr (std::is_same_v<T, VarRef>) {
            const VarDecl* d = find_var(decls, x.name);
            if (d == nullptr) {
              report("UNKNOWN_VARIABLE", "reference to undeclared '" + x.name + "'");
              return ExprType::Bad;
            }
            switch (d->kind) {
              case VarKind::BoundedInt:
              case VarKind::UnboundedInt:
                return ExprType::Int;
              case VarKind::Bool:
                return ExprType::Bool;
              default:
                report("TYPE_MISMATCH", "'" + x.name + "' has no value");
                return ExprType::Bad;
            }
          } else if constexpr (std::is_same_v<T, EventRef>) {
            const VarDecl* d = find_var(decls, x.name);
            if (d == nullptr || d->kind != VarKind::Event) {
              report("UNKNOWN_VARIABLE", "'" + x.name + "' is not a declared event");
              return ExprType::Bad;
            }
            if (!events_allowed) {
              report("TYPE_MISMATCH", "event '" + x.name + "' is not allowed here");
              return ExprType::Bad;
            }
            return ExprType::Bool;
          } else if constexpr (std::is_same_v<T, TriggerRef>) {
            if (!triggers_allowed) {
              report("TYPE_MISMATCH", "timing trigger is not allowed here");
              return ExprType::Bad;
            }
            if (x.amount < 0) {
              report("TRIGGER_NEGATIVE", "trigger duration must be non-negative");
              return ExprType::Bad;
            }
            if (x.kind == TriggerKind::Every && x.amount == 0) {
              // The timed encoding gives `every 0s` the invariant c <= 0 with a
              // mandatory delay each cycle; no schedule satisfies it.
              report("TRIGGER_PERIOD_ZERO", "'every 0s' admits no delay");
              return ExprType::Bad;
            }
            return ExprType::Bool;
          } else if constexpr (std::is_same_v<T, ChanRecv> ||
                               std::is_same_v<T, ChanSend>) {
            report("CHANNEL_IN_STATECHART",
                   "channel atoms cannot appear in statechart definitions");
            return ExprType::Bad;
          } else if constexpr (std::is_same_v<T, Compare>) {
            ExprType l = check(x.lhs), r = check(x.rhs);
            if (l == ExprType::Bad || r == ExprType::Bad) return ExprType::Bad;
            if (l != ExprType::Int || r != ExprType::Int) {
              report("TYPE_MISMATCH", "comparison over non-integer operands");
              return ExprType::Bad;
            }
            return ExprType::Bool;
          } else if constexpr (std::is_same_v<T, Arith>) {
            ExprType l = check(x.lhs), r = check(x.rhs);
            if (l == ExprType::Bad || r == ExprType::Bad) return ExprType::Bad;
            if (l != ExprType::Int || r != ExprType::Int) {
              report("TYPE_MISMATCH", "arithmetic over non-integer operands");
              return ExprType::Bad;
            }
            return ExprType::Int;
          } else if constexpr (std::is_same_v<T, LogicalAnd> ||
                               std::is_same_v<T, LogicalOr>) {
            ExprType l = check(x.lhs), r = check(x.rhs);
            if (l == ExprType::Bad || r == ExprType::Bad) return ExprType::Bad;
            if (l != ExprType::Bool || r != ExprType::Bool) {
              report("TYPE_MISMATCH", "logical connective over non-boolean operands");
              return ExprType::Bad;
            }
            return ExprType::Bool;
          } else {
            ExprType t = check(x.operand);
            if (t == ExprType::Bad) return ExprType::Bad;
            if (t != ExprType::Bool) {
              report("TYPE_MISMATCH", "negation of a non-boolean operand");
              return ExprType::Bad;
            }
            return ExprType::Bool;
          }
        },
        e.node().node);
  }

  void check_actions(const ActionSeq& seq) {
    for (const auto& item : seq.items) {
      if (const auto* assign = std::get_if<AssignAction>(&item)) {
        const VarDecl* d = find_var(decls, assign->var);
        if (d != nullptr && d->kind == VarKind::Event) {
          report("EVENT_IN_ACTION",
                 "events cannot be assigned; '" + assign->var + "' is an event");
          continue;
        }
        if (d == nullptr || !is_valued(d->kind)) {
          report("UNKNOWN_VARIABLE",
                 "assignment to undeclared variable '" + assign->var + "'");
          continue;
        }
        bool saved_events = events_allowed;
        bool saved_triggers = triggers_allowed;
        events_allowed = false;
        triggers_allowed = false;
        ExprType t = check(assign->value);
        events_allowed = saved_events;
        triggers_allowed = saved_triggers;
        if (t == ExprType::Bad) continue;
        ExprType want = d->kind == VarKind::Bool ? ExprType::Bool : ExprType::Int;
        if (t != want)
          report("TYPE_MISMATCH", "assignment to '" + assign->var +
                                      "' has the wrong value type");
      } else {
        report("TYPE_MISMATCH", "only assignments are allowed in statechart actions");
      }
    }
  }
};

const char* kReservedNames[] = {"alpha", "true", "false", "Inc", "after", "every"};

}  // namespace

std::vector<Diagnostic> validate(const StatechartNetwork& net) {
  std::vector<Diagnostic> diags;
  auto report = [&](const std::string& code, const std::string& msg) {
    diags.push_back({code, msg, 0, 0});
  };

  if (net.charts.empty()) report("NO_CHARTS", "network declares no statecharts");

  // Variable declarations.
  std::set<std::string> var_names;
  for (const auto& v : net.variables) {
    if (!var_names.insert(v.name).second)
      report("DUPLICATE_NAME", "variable '" + v.name + "' declared twice");
    for (const char* reserved : kReservedNames) {
      if (v.name == reserved)
        report("RESERVED_NAME", "'" + v.name + "' is a reserved identifier");
    }
    if (v.kind == VarKind::Channel || v.kind == VarKind::Clock)
      report("CHANNEL_IN_STATECHART",
             "'" + v.name + "': channels and clocks cannot be declared in networks");
    if (v.kind == VarKind::BoundedInt) {
      if (v.lo > v.hi)
        report("DOMAIN_ERROR", "'" + v.name + "' has an empty domain");
      const auto* init = std::get_if<std::int64_t>(&v.initial);
      if (init == nullptr)
        report("TYPE_MISMATCH", "'" + v.name + "' needs an integer initial value");
      else if (*init < v.lo || *init > v.hi)
        report("DOMAIN_ERROR",
               "initial value of '" + v.name + "' lies outside its domain");
    }
    if (v.kind == VarKind::UnboundedInt &&
        !std::holds_alternative<std::int64_t>(v.initial))
      report("TYPE_MISMATCH", "'" + v.name + "' needs an integer initial value");
    if (v.kind == VarKind::Bool && !std::holds_alternative<bool>(v.initial))
      report("TYPE_MISMATCH", "'" + v.name + "' needs a boolean initial value");
  }

  // Chart priorities must be exactly 1..n in order.
  std::set<std::string> chart_names;
  for (std::size_t i = 0; i < net.charts.size(); ++i) {
    const auto& chart = net.charts[i];
    if (!chart_names.insert(chart.name).second)
      report("DUPLICATE_NAME", "statechart '" + chart.name + "' declared twice");
    if (chart.priority != static_cast<int>(i) + 1)
      report("PRIORITY_GAP",
             "statechart priorities must form 1..n; '" + chart.name + "' has " +
                 std::to_string(chart.priority) + " at position " +
                 std::to_string(i + 1));
  }

  for (const auto& chart : net.charts) {
    std::set<std::string> state_names;
    for (const auto& s : chart.states) {
      if (!state_names.insert(s.id).second)
        report("DUPLICATE_NAME",
               chart.name + ": state '" + s.id + "' declared twice");
    }

    std::set<std::string> transition_names;
    std::map<std::string, std::set<int>> priorities_per_state;
    for (const auto& t : chart.transitions) {
      if (!transition_names.insert(t.id).second)
        report("DUPLICATE_NAME",
               chart.name + ": transition '" + t.id + "' declared twice");
      if (state_names.count(t.source) == 0)
        report("UNKNOWN_STATE",
               chart.name + "." + t.id + ": unknown source state '" + t.source + "'");
      if (state_names.count(t.target) == 0)
        report("UNKNOWN_STATE",
               chart.name + "." + t.id + ": unknown target state '" + t.target + "'");
      if (t.priority < 1)
        report("DUPLICATE_PRIORITY",
               chart.name + "." + t.id + ": priorities start at 1");
      else if (!priorities_per_state[t.source].insert(t.priority).second)
        report("DUPLICATE_PRIORITY",
               chart.name + ": two transitions from '" + t.source +
                   "' share priority " + std::to_string(t.priority));
    }

    // Initial-state discipline: declared, known, and its single outgoing
    // transition is `when true` with no action at priority 1.
    if (chart.initial.empty()) {
      report("INITIAL_MISSING", chart.name + ": no initial state declared");
    } else if (state_names.count(chart.initial) == 0) {
      report("UNKNOWN_STATE",
             chart.name + ": initial state '" + chart.initial + "' is not declared");
    } else {
      auto out = chart.outgoing(chart.initial);
      if (out.size() != 1) {
        report("INITIAL_OUTGOING_COUNT",
               chart.name + ": initial state '" + chart.initial +
                   "' must have exactly one outgoing transition, has " +
                   std::to_string(out.size()));
      } else {
        const TransitionDef& t = *out.front();
        if (!expr_equal(t.guard, Expr::bool_lit(true)))
          report("INITIAL_GUARD_NOT_TRUE",
                 chart.name + "." + t.id + ": initial transition must be 'when true'");
        if (!t.action.empty())
          report("INITIAL_ACTION_NOT_EMPTY",
                 chart.name + "." + t.id + ": initial transition must have no action");
        if (t.priority != 1)
          report("INITIAL_PRIORITY",
                 chart.name + "." + t.id + ": initial transition must have priority 1");
      }
    }

    for (const auto& t : chart.transitions) {
      TypeChecker checker{net.variables, true, true,
                          chart.name + "." + t.id + " guard", diags};
      ExprType gt = checker.check(t.guard);
      if (gt == ExprType::Int)
        report("TYPE_MISMATCH", chart.name + "." + t.id + ": guard is not boolean");
      TypeChecker action_checker{net.variables, false, false,
                                 chart.name + "." + t.id + " action", diags};
      action_checker.check_actions(t.action);
    }
    for (const auto& s : chart.states) {
      TypeChecker entry_checker{net.variables, false, false,
                                chart.name + "." + s.id + " entry", diags};
      entry_checker.check_actions(s.entry);
      TypeChecker exit_checker{net.variables, false, false,
                               chart.name + "." + s.id + " exit", diags};
      exit_checker.check_actions(s.exit);
    }
  }

  // Trigger occurrence ids must be unique network-wide (the parser numbers
  // them densely; programmatic builders must call renumber_trigger_occurrences).
  std::set<int> occurrence_ids;
  for (const auto& occ : trigger_occurrences(net)) {
    if (!occurrence_ids.insert(occ.id).second)
      report("OCCURRENCE_DUPLICATE",
             occ.chart + "." + occ.transition +
                 ": trigger occurrence id used twice; renumber occurrences");
  }

  return diags;
}

// ---------------------------------------------------------------------------
// Canonical printing
// ---------------------------------------------------------------------------

namespace {

std::string print_action_block(const ActionSeq& seq) {
  std::string out = "{ ";
  for (const auto& item : seq.items) {
    if (const auto* assign = std::get_if<AssignAction>(&item)) {
      out += assign->var + " := " + render_expr(assign->value, ExprStyle::Compact) + "; ";
    }
  }
  out += "}";
  return out;
}

}  // namespace

std::string print_network(const StatechartNetwork& net) {
  std::ostringstream os;
  if (!net.variables.empty()) {
    os << "var {\n";
    for (const auto& v : net.variables) {
      switch (v.kind) {
        case VarKind::BoundedInt:
          os << "  int " << v.name << " = " << render_value(v.initial) << " in ["
             << v.lo << ", " << v.hi << "];\n";
          break;
        case VarKind::UnboundedInt:
          os << "  int " << v.name << " = " << render_value(v.initial) << ";\n";
          break;
        case VarKind::Bool:
          os << "  bool " << v.name << " = " << render_value(v.initial) << ";\n";
          break;
        case VarKind::Event:
          os << "  event " << v.name << ";\n";
          break;
        default:
          break;  // channels/clocks never occur in statechart networks
      }
    }
    os << "}\n";
  }
  for (const auto& chart : net.charts) {
    os << "\nstatechart " << chart.name << " priority " << chart.priority << " {\n";
    for (const auto& s : chart.states) {
      os << "  state " << s.id;
      if (!s.entry.empty()) os << " entry " << print_action_block(s.entry);
      if (!s.exit.empty()) os << " exit " << print_action_block(s.exit);
      os << ";\n";
    }
    os << "  initial " << chart.initial << ";\n";
    for (const auto& t : chart.transitions) {
      os << "  transition " << t.id << ": " << t.source << " -> " << t.target
         << " priority " << t.priority << " when "
         << render_expr(t.guard, ExprStyle::Compact);
      if (!t.action.empty()) os << " do " << print_action_block(t.action);
      os << ";\n";
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace scforge
