#include <doctest.h>

#include <set>

#include "scforge/equivalence.hpp"
#include "scforge/transform.hpp"
#include "support/fuzz.hpp"

using namespace scforge;

TEST_CASE("generator is deterministic per seed") {
  CHECK(fuzz::random_network_text(42) == fuzz::random_network_text(42));
  CHECK(fuzz::random_network_text(42) != fuzz::random_network_text(43));
}

TEST_CASE("generated networks parse, validate and respect the limits") {
  fuzz::Limits lim;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    StatechartNetwork net = fuzz::random_network(seed, lim);
    CHECK(static_cast<int>(net.charts.size()) <= lim.max_charts);
    int events = 0;
    for (const VarDecl& v : net.variables) {
      if (v.kind == VarKind::Event) ++events;
      if (v.kind == VarKind::BoundedInt) {
        CHECK(v.lo == 0);
        CHECK(v.hi <= lim.max_hi);
      }
      CHECK(v.kind != VarKind::UnboundedInt);
    }
    CHECK(events <= lim.max_events);
    for (const StatechartDef& c : net.charts)
      CHECK(static_cast<int>(c.states.size()) <= lim.max_states);
    CHECK(static_cast<int>(trigger_occurrences(net).size()) <= lim.max_triggers);
  }
}

TEST_CASE("a sample of generated networks co-simulate equivalently") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    StatechartNetwork net = fuzz::random_network(seed);
    TransformResult tr = transform_network(net);
    std::vector<std::string> names = net.event_names();
    std::set<std::string> events(names.begin(), names.end());
    std::vector<EventEnv> envs = random_schedules(events, seed, 3, 10);
    EquivalenceReport report =
        check_model_equivalence(net, tr.ta, tr.map, envs, 10);
    if (!report.equivalent)
      MESSAGE("seed ", seed, ":\n", fuzz::random_network_text(seed), "\n",
              equivalence_report_to_text(report));
    CHECK(report.equivalent);
  }
}
