#include <doctest.h>

#include "scforge/transform.hpp"
#include "support/paths.hpp"

using namespace scforge;
namespace st = scforge::testing;

namespace {

StatechartNetwork fig2() {
  ParseResult r = parse_network(st::fixture("fig2.scn"));
  REQUIRE(r.ok());
  return *r.network;
}

StatechartNetwork overlapping_guards() {
  // x>0 and x>1 overlap for x>=2; only rule 6 separates them.
  ParseResult r = parse_network(
      "var { int x = 2 in [0, 3]; }\n"
      "statechart O priority 1 {\n"
      "  state a; state b; state c;\n"
      "  initial a;\n"
      "  transition t0: a -> b when true;\n"
      "  transition t1: b -> c priority 1 when x > 0;\n"
      "  transition t2: b -> b priority 2 when x > 1;\n"
      "}\n");
  REQUIRE(r.ok());
  return *r.network;
}

}  // namespace

TEST_CASE("each stage dump matches its stored form") {
  StatechartNetwork net = fig2();
  for (int stage = 1; stage <= 7; ++stage) {
    CAPTURE(stage);
    TransformResult res = transform_network(net, {.stage = stage, .skip = {}});
    CHECK(dump_ta_network(res.ta) ==
          st::golden("fig2_stage" + std::to_string(stage) + ".txt"));
  }
}

TEST_CASE("the finished network has thirteen transformed edges") {
  TransformResult res = transform_network(fig2());
  std::size_t transformed_edges = 0;
  for (const auto& a : res.ta.automata) {
    if (a.role == AutomatonRole::Transformed) transformed_edges += a.edges.size();
  }
  CHECK(transformed_edges == 13);
  CHECK(res.ta.automata.size() == 5);  // Y1, Y2 + one event aux + two timer auxes
  CHECK(res.ta.lockstep_n == 2);
  const VarDecl* alpha = find_var(res.ta.variables, res.ta.alpha_var);
  REQUIRE(alpha != nullptr);
  CHECK(alpha->kind == VarKind::BoundedInt);
  CHECK(alpha->lo == 1);
  CHECK(alpha->hi == 2);
  CHECK(std::get<std::int64_t>(alpha->initial) == 1);
}

TEST_CASE("the bookkeeping maps satisfy their structural laws at every stage") {
  StatechartNetwork net = fig2();
  for (int stage : {1, 3, 4, 5, 6, 7}) {
    CAPTURE(stage);
    TransformResult res = transform_network(net, {.stage = stage, .skip = {}});
    CHECK(check_map_lemmas(net, res.ta, res.map).empty());
  }
}

TEST_CASE("map corruption is caught") {
  StatechartNetwork net = fig2();
  TransformResult res = transform_network(net);

  TransformMap broken = res.map;
  broken.chart_to_automaton.erase("Y1");
  CHECK(has_diagnostic(check_map_lemmas(net, res.ta, broken), "MAP_CHART_MISSING"));

  broken = res.map;
  broken.state_to_location["Y1.s1"] = "Y1.s2";
  CHECK(has_diagnostic(check_map_lemmas(net, res.ta, broken),
                       "MAP_STATE_NOT_INJECTIVE"));

  broken = res.map;
  broken.transition_to_edge["Y1.t1"] = "Y1.missing";
  CHECK(has_diagnostic(check_map_lemmas(net, res.ta, broken), "MAP_TRANSITION_BROKEN"));

  broken = res.map;
  broken.variable_map.erase("x");
  CHECK(has_diagnostic(check_map_lemmas(net, res.ta, broken), "MAP_VARIABLE_MISSING"));
}

TEST_CASE("occurrence channels and clocks are assigned in order") {
  TransformResult res = transform_network(fig2());
  CHECK(res.map.occurrence_channel ==
        std::map<int, std::string>{{0, "after5s"}, {1, "every10s"}});
  CHECK(res.map.occurrence_clock == std::map<int, std::string>{{0, "c1"}, {1, "c2"}});
  CHECK(res.map.event_channel == std::map<std::string, std::string>{{"eventA", "eventA"}});
}

TEST_CASE("channel names avoid clashes with declared variables") {
  ParseResult r = parse_network(
      "var { int after5s = 0 in [0, 1]; }\n"
      "statechart C priority 1 {\n"
      "  state a; state b;\n"
      "  initial a;\n"
      "  transition t0: a -> b when true;\n"
      "  transition t1: b -> a priority 1 when after 5s;\n"
      "}\n");
  REQUIRE(r.ok());
  TransformResult res = transform_network(*r.network);
  CHECK(res.map.occurrence_channel.at(0) == "after5s_2");
  CHECK(res.ta.find_automaton("U_after5s_2") != nullptr);
}

TEST_CASE("priority resolution keeps sibling guards mutually exclusive") {
  CHECK(check_guard_exclusivity(transform_network(fig2(), {.stage = 6, .skip = {}}).ta).empty());
  CHECK(check_guard_exclusivity(transform_network(fig2()).ta).empty());
  CHECK(check_guard_exclusivity(transform_network(overlapping_guards()).ta).empty());

  TransformResult skipped =
      transform_network(overlapping_guards(), {.stage = 6, .skip = {6}});
  CHECK(has_diagnostic(check_guard_exclusivity(skipped.ta), "RULE6_OVERLAP"));
}

TEST_CASE("lockstep scheduling makes exactly one edge eligible per turn") {
  CHECK(check_lockstep_totality(transform_network(fig2()).ta).empty());
  CHECK(check_lockstep_totality(transform_network(overlapping_guards()).ta).empty());

  CHECK(has_diagnostic(check_lockstep_totality(transform_network(fig2(), {.stage = 6, .skip = {}}).ta),
                       "RULE7_MISSING"));
  CHECK(has_diagnostic(
      check_lockstep_totality(transform_network(fig2(), {.stage = 7, .skip = {7}}).ta),
      "RULE7_MISSING"));
  TransformResult no6 = transform_network(overlapping_guards(), {.stage = 7, .skip = {6}});
  CHECK(has_diagnostic(check_lockstep_totality(no6.ta), "RULE7_OVERLAP"));
}

TEST_CASE("sync roles derive from the guard's channel atom") {
  TransformResult res = transform_network(fig2());
  const TimedAutomatonDef* y1 = res.ta.find_automaton("Y1");
  REQUIRE(y1 != nullptr);

  const EdgeDef* t1 = nullptr;
  const EdgeDef* t2 = nullptr;
  const EdgeDef* self_s1 = nullptr;
  for (const auto& e : y1->edges) {
    if (e.id == "t1") t1 = &e;
    if (e.id == "t2") t2 = &e;
    if (e.id == "self_s1") self_s1 = &e;
  }
  REQUIRE(t1 != nullptr);
  REQUIRE(t2 != nullptr);
  REQUIRE(self_s1 != nullptr);

  CHECK(edge_sync(*t1).kind == SyncKind::None);
  CHECK(edge_sync(*t2).kind == SyncKind::Receive);
  CHECK(edge_sync(*t2).channel == "eventA");
  CHECK(render_expr(guard_without_sync(*t2), ExprStyle::Compact) == "alpha==1");
  CHECK(unexportable_channel_atoms(*t2).empty());

  // The stutter loop negates the receive; that atom cannot become a sync.
  CHECK(edge_sync(*self_s1).kind == SyncKind::None);
  CHECK(unexportable_channel_atoms(*self_s1) == std::vector<std::string>{"eventA?"});

  const TimedAutomatonDef* aux = res.ta.find_automaton("U_eventA");
  REQUIRE(aux != nullptr);
  CHECK(edge_sync(aux->edges[0]).kind == SyncKind::Send);
  CHECK(edge_sync(aux->edges[0]).channel == "eventA");
  CHECK(expr_equal(guard_without_sync(aux->edges[0]), Expr::bool_lit(true)));
}

TEST_CASE("skipping a rule leaves its source constructs in place") {
  StatechartNetwork net = fig2();

  std::string no4 = dump_ta_network(transform_network(net, {.stage = 7, .skip = {4}}).ta);
  CHECK(no4.find("event eventA") != std::string::npos);  // still an event decl
  CHECK(no4.find("eventA?") == std::string::npos);
  CHECK(no4.find("eventA &&") != std::string::npos);  // raw atom in a guard

  std::string no5 = dump_ta_network(transform_network(net, {.stage = 7, .skip = {5}}).ta);
  CHECK(no5.find("after 5s &&") != std::string::npos);
  CHECK(no5.find("clock") == std::string::npos);

  std::string no2 = dump_ta_network(transform_network(net, {.stage = 7, .skip = {2}}).ta);
  CHECK(no2.find("<x=2; x=0; x=5") == std::string::npos);

  CHECK_THROWS_AS(transform_network(net, {.stage = 7, .skip = {1}}), std::invalid_argument);
  CHECK_THROWS_AS(transform_network(net, {.stage = 9, .skip = {}}), std::invalid_argument);
}

TEST_CASE("stages below seven carry no lockstep machinery") {
  TransformResult res = transform_network(fig2(), {.stage = 6, .skip = {}});
  CHECK(res.ta.alpha_var.empty());
  CHECK(res.ta.lockstep_n == 0);
  CHECK(find_var(res.ta.variables, "alpha") == nullptr);
  for (const auto& a : res.ta.automata) {
    for (const auto& e : a.edges) CHECK(e.id.rfind("self_", 0) != 0);
  }
}
