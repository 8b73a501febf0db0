#include <doctest.h>

#include "scforge/core.hpp"

using namespace scforge;

namespace {

std::vector<VarDecl> small_decls() {
  return {
      {"x", VarKind::BoundedInt, 0, 15, std::int64_t{0}},
      {"k", VarKind::UnboundedInt, 0, 0, std::int64_t{-1}},
      {"b", VarKind::Bool, 0, 0, false},
      {"eventA", VarKind::Event, 0, 0, std::int64_t{0}},
  };
}

}  // namespace

TEST_CASE("initial valuation covers exactly the valued declarations") {
  Valuation v = initial_valuation(small_decls());
  CHECK(v.values.size() == 3);
  CHECK(std::get<std::int64_t>(v.values.at("x")) == 0);
  CHECK(std::get<std::int64_t>(v.values.at("k")) == -1);
  CHECK(std::get<bool>(v.values.at("b")) == false);
  CHECK(v.values.count("eventA") == 0);
}

TEST_CASE("arithmetic and comparison evaluation") {
  Valuation v = initial_valuation(small_decls());
  v.values["x"] = std::int64_t{5};
  GuardContext ctx = GuardContext::none();

  Expr sum = Expr::arith(ArithOp::Add, Expr::var("x"), Expr::int_lit(2));
  CHECK(std::get<std::int64_t>(eval_expr(sum, v, ctx)) == 7);

  Expr div = Expr::arith(ArithOp::Div, Expr::var("x"), Expr::int_lit(2));
  CHECK(std::get<std::int64_t>(eval_expr(div, v, ctx)) == 2);

  Expr cmp = Expr::cmp(CmpOp::Gt, Expr::var("x"), Expr::int_lit(4));
  CHECK(eval_bool(cmp, v, ctx));
  CHECK_FALSE(eval_bool(Expr::cmp(CmpOp::Ne, Expr::var("x"), Expr::int_lit(5)), v, ctx));
}

TEST_CASE("division by zero raises an evaluation error") {
  Valuation v = initial_valuation(small_decls());
  GuardContext ctx = GuardContext::none();
  Expr bad = Expr::arith(ArithOp::Div, Expr::int_lit(1), Expr::var("x"));
  CHECK_THROWS_AS(eval_expr(bad, v, ctx), EvalError);
  try {
    eval_expr(bad, v, ctx);
  } catch (const EvalError& e) {
    CHECK(e.code == "DivisionByZero");
  }
}

TEST_CASE("unbound variables raise an evaluation error") {
  Valuation v;
  GuardContext ctx = GuardContext::none();
  CHECK_THROWS_AS(eval_expr(Expr::var("nope"), v, ctx), EvalError);
}

TEST_CASE("logical connectives short-circuit") {
  Valuation v;
  GuardContext ctx = GuardContext::none();
  // The right operand is unbound, so only short-circuiting avoids a throw.
  Expr lhs_false = Expr::land(Expr::bool_lit(false), Expr::var("nope"));
  CHECK_FALSE(eval_bool(lhs_false, v, ctx));
  Expr lhs_true = Expr::lor(Expr::bool_lit(true), Expr::var("nope"));
  CHECK(eval_bool(lhs_true, v, ctx));
  CHECK_THROWS_AS(eval_bool(Expr::land(Expr::bool_lit(true), Expr::var("nope")), v, ctx),
                  EvalError);
}

TEST_CASE("boolean/integer mixing is a type error") {
  Valuation v = initial_valuation(small_decls());
  GuardContext ctx = GuardContext::none();
  Expr bad = Expr::land(Expr::var("x"), Expr::var("b"));
  CHECK_THROWS_AS(eval_bool(bad, v, ctx), EvalError);
  Expr bad2 = Expr::arith(ArithOp::Add, Expr::var("b"), Expr::int_lit(1));
  CHECK_THROWS_AS(eval_expr(bad2, v, ctx), EvalError);
}

TEST_CASE("event atoms read the current cycle's broadcast set") {
  Valuation v;
  GuardContext with = GuardContext::statechart({"eventA"}, {});
  GuardContext without = GuardContext::statechart({}, {});
  CHECK(eval_bool(Expr::event("eventA"), v, with));
  CHECK_FALSE(eval_bool(Expr::event("eventA"), v, without));
  // Events are not executable outside a statechart cycle context.
  CHECK_THROWS_AS(eval_bool(Expr::event("eventA"), v, GuardContext::none()), EvalError);
  CHECK_THROWS_AS(eval_bool(Expr::event("eventA"), v, GuardContext::timed({})), EvalError);
}

TEST_CASE("trigger atoms read the ticking set by occurrence id") {
  Valuation v;
  GuardContext ctx = GuardContext::statechart({}, {1});
  CHECK_FALSE(eval_bool(Expr::trigger(TriggerKind::After, 5, 0), v, ctx));
  CHECK(eval_bool(Expr::trigger(TriggerKind::Every, 10, 1), v, ctx));
}

TEST_CASE("channel atoms read the offer set and only in timed contexts") {
  Valuation v;
  GuardContext ctx = GuardContext::timed({"after5s"});
  CHECK(eval_bool(Expr::chan_recv("after5s"), v, ctx));
  CHECK_FALSE(eval_bool(Expr::chan_recv("eventA"), v, ctx));
  CHECK_THROWS_AS(eval_bool(Expr::chan_recv("after5s"), v, GuardContext::none()),
                  EvalError);
}

TEST_CASE("clock lookups fall back to the clock valuation") {
  Valuation v;
  ClockValuation clocks{{"c1", 10}};
  GuardContext ctx = GuardContext::timed({});
  Expr g = Expr::cmp(CmpOp::Eq, Expr::var("c1"), Expr::int_lit(10));
  CHECK(eval_bool(g, v, ctx, &clocks));
  clocks["c1"] = 3;
  CHECK_FALSE(eval_bool(g, v, ctx, &clocks));
}

TEST_CASE("actions apply left to right") {
  auto decls = small_decls();
  Valuation v = initial_valuation(decls);
  ActionSeq seq;
  seq.items.push_back(AssignAction{"x", Expr::int_lit(5)});
  seq.items.push_back(AssignAction{"k", Expr::arith(ArithOp::Add, Expr::var("x"),
                                                    Expr::int_lit(1))});
  Valuation out = apply_actions(seq, v, decls);
  CHECK(std::get<std::int64_t>(out.values.at("x")) == 5);
  CHECK(std::get<std::int64_t>(out.values.at("k")) == 6);
  // The input valuation is untouched.
  CHECK(std::get<std::int64_t>(v.values.at("x")) == 0);
}

TEST_CASE("bounded assignment outside the domain overflows") {
  std::vector<VarDecl> decls{{"x", VarKind::BoundedInt, 0, 3, std::int64_t{3}}};
  Valuation v = initial_valuation(decls);
  ActionSeq seq;
  seq.items.push_back(
      AssignAction{"x", Expr::arith(ArithOp::Add, Expr::var("x"), Expr::int_lit(1))});
  CHECK_THROWS_AS(apply_actions(seq, v, decls), DomainOverflowError);
  try {
    apply_actions(seq, v, decls);
  } catch (const DomainOverflowError& e) {
    CHECK(e.var == "x");
    CHECK(e.value == 4);
  }
}

TEST_CASE("clock resets and the lockstep bump") {
  std::vector<VarDecl> decls{{"alpha", VarKind::BoundedInt, 1, 2, std::int64_t{1}}};
  Valuation v = initial_valuation(decls);
  ClockValuation clocks{{"c1", 7}};
  ActionSeq seq;
  seq.items.push_back(ClockResetAction{"c1"});
  seq.items.push_back(IncAlphaAction{"alpha", 2});
  Valuation out = apply_actions(seq, v, decls, &clocks);
  CHECK(clocks.at("c1") == 0);
  CHECK(std::get<std::int64_t>(out.values.at("alpha")) == 2);
  out = apply_actions(seq, out, decls, &clocks);
  CHECK(std::get<std::int64_t>(out.values.at("alpha")) == 1);
  // Clock resets need a clock valuation to act on.
  CHECK_THROWS_AS(apply_actions(seq, v, decls, nullptr), EvalError);
}

TEST_CASE("conjunct flattening walks the && spine only") {
  Expr g = Expr::land(Expr::land(Expr::var("a"), Expr::var("b")),
                      Expr::lor(Expr::var("c"), Expr::var("d")));
  auto parts = top_conjuncts(g);
  REQUIRE(parts.size() == 3);
  CHECK(expr_equal(parts[0], Expr::var("a")));
  CHECK(expr_equal(parts[1], Expr::var("b")));
  CHECK(expr_equal(parts[2], Expr::lor(Expr::var("c"), Expr::var("d"))));
}

TEST_CASE("structural equality distinguishes shape and leaves") {
  Expr a = Expr::cmp(CmpOp::Gt, Expr::var("x"), Expr::int_lit(0));
  Expr b = Expr::cmp(CmpOp::Gt, Expr::var("x"), Expr::int_lit(0));
  Expr c = Expr::cmp(CmpOp::Ge, Expr::var("x"), Expr::int_lit(0));
  CHECK(expr_equal(a, b));
  CHECK_FALSE(expr_equal(a, c));
  CHECK_FALSE(expr_equal(a, Expr::lnot(a)));
}

TEST_CASE("reference collection") {
  Expr g = Expr::land(Expr::cmp(CmpOp::Gt, Expr::var("x"), Expr::var("y")),
                      Expr::land(Expr::chan_recv("after5s"),
                                 Expr::trigger(TriggerKind::After, 5, 3)));
  CHECK(referenced_names(g) == std::set<std::string>{"x", "y"});
  CHECK(referenced_channels(g) == std::set<std::string>{"after5s"});
  CHECK(referenced_trigger_occurrences(g) == std::set<int>{3});
}

TEST_CASE("expression rendering, compact and spaced") {
  Expr t4 = Expr::land(Expr::cmp(CmpOp::Gt, Expr::var("x"), Expr::int_lit(1)),
                       Expr::lnot(Expr::cmp(CmpOp::Gt, Expr::var("x"), Expr::int_lit(0))));
  CHECK(render_expr(t4, ExprStyle::Compact) == "x>1 && !(x>0)");
  CHECK(render_expr(t4, ExprStyle::Spaced) == "x > 1 && !(x > 0)");

  Expr prec = Expr::land(Expr::lor(Expr::var("a"), Expr::var("b")), Expr::var("c"));
  CHECK(render_expr(prec, ExprStyle::Compact) == "(a || b) && c");

  Expr arith = Expr::arith(ArithOp::Mul, Expr::arith(ArithOp::Add, Expr::var("x"),
                                                     Expr::int_lit(1)),
                           Expr::int_lit(2));
  CHECK(render_expr(arith, ExprStyle::Compact) == "(x+1)*2");
  CHECK(render_expr(arith, ExprStyle::Spaced) == "(x + 1) * 2");

  Expr trig = Expr::trigger(TriggerKind::Every, 10, 0);
  CHECK(render_expr(trig, ExprStyle::Compact) == "every 10s");
  CHECK(render_expr(Expr::chan_recv("v1"), ExprStyle::Compact) == "v1?");
  CHECK(render_expr(Expr::chan_send("v1"), ExprStyle::Compact) == "v1!");
}

TEST_CASE("action rendering matches the tuple and label styles") {
  ActionSeq seq;
  seq.items.push_back(AssignAction{"x", Expr::int_lit(2)});
  seq.items.push_back(AssignAction{"x", Expr::int_lit(0)});
  seq.items.push_back(AssignAction{"x", Expr::int_lit(5)});
  CHECK(render_actions(seq, ExprStyle::Compact) == "x=2; x=0; x=5");
  CHECK(render_actions(seq, ExprStyle::Spaced) == "x = 2, x = 0, x = 5");

  ActionSeq bump;
  bump.items.push_back(IncAlphaAction{"alpha", 2});
  CHECK(render_actions(bump, ExprStyle::Compact) == "Inc(alpha)");
  CHECK(render_actions(bump, ExprStyle::Spaced) == "alpha = alpha % 2 + 1");
}

TEST_CASE("rewriting replaces event and trigger atoms") {
  Expr g = Expr::land(Expr::event("eventA"), Expr::trigger(TriggerKind::After, 5, 0));
  ExprRewriter rw;
  rw.on_event = [](const EventRef& e) { return Expr::chan_recv(e.name); };
  rw.on_trigger = [](const TriggerRef&) { return Expr::chan_recv("after5s"); };
  Expr out = rewrite_expr(g, rw);
  CHECK(expr_equal(out, Expr::land(Expr::chan_recv("eventA"), Expr::chan_recv("after5s"))));
  // Identity without hooks.
  CHECK(expr_equal(rewrite_expr(g, ExprRewriter{}), g));
}

TEST_CASE("action concatenation preserves order") {
  ActionSeq a, b;
  a.items.push_back(AssignAction{"x", Expr::int_lit(1)});
  b.items.push_back(AssignAction{"y", Expr::int_lit(2)});
  ActionSeq ab = ActionSeq::concat(a, b);
  REQUIRE(ab.items.size() == 2);
  CHECK(render_actions(ab, ExprStyle::Compact) == "x=1; y=2");
  CHECK(actions_equal(ab, ActionSeq::concat(a, b)));
  CHECK_FALSE(actions_equal(ab, a));
}
