#include "scforge/verify.hpp"

#include <deque>
#include <functional>
#include <sstream>

namespace scforge {

// ---------------------------------------------------------------------------
// Property files
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<SafetyProperty> parse_properties(const std::string& text,
                                             const StatechartNetwork& net,
                                             std::vector<Diagnostic>& diags) {
  std::vector<SafetyProperty> props;
  std::istringstream lines(text);
  std::string raw;
  int line_no = 0;
  int counter = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto c = line.find("//"); c != std::string::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;

    ++counter;
    auto report = [&](const std::string& code, const std::string& msg) {
      diags.push_back({code, msg, line_no, 1});
    };

    std::size_t a = line.find("A[]");
    if (a == std::string::npos) {
      report("PROP_SYNTAX", "a property line starts with `A[]` (after an optional `name:` prefix)");
      continue;
    }
    SafetyProperty prop;
    std::string prefix = trim(line.substr(0, a));
    if (!prefix.empty()) {
      if (prefix.back() != ':' || prefix.size() < 2) {
        report("PROP_SYNTAX", "text before `A[]` must be a `name:` prefix");
        continue;
      }
      prop.name = trim(prefix.substr(0, prefix.size() - 1));
    } else {
      prop.name = "P" + std::to_string(counter);
    }

    std::istringstream rest(line.substr(a + 3));
    std::string state_ref, imply;
    rest >> state_ref >> imply;
    std::string formula;
    std::getline(rest, formula);
    formula = trim(formula);
    if (imply != "imply" || formula.empty()) {
      report("PROP_SYNTAX", "expected `A[] Chart.State imply <expr>`");
      continue;
    }
    std::size_t dot = state_ref.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == state_ref.size()) {
      report("PROP_SYNTAX", "the state reference must read `Chart.State`");
      continue;
    }
    prop.chart = state_ref.substr(0, dot);
    prop.state = state_ref.substr(dot + 1);

    const StatechartDef* chart = net.find_chart(prop.chart);
    if (chart == nullptr) {
      report("UNKNOWN_CHART", "no statechart named '" + prop.chart + "'");
      continue;
    }
    if (chart->find_state(prop.state) == nullptr) {
      report("UNKNOWN_STATE", "statechart '" + prop.chart + "' has no state '" +
                                  prop.state + "'");
      continue;
    }
    std::vector<Diagnostic> expr_diags;
    auto cond = parse_guard_text(formula, net, expr_diags);
    if (!cond.has_value()) {
      for (auto& d : expr_diags) {
        d.line = line_no;
        diags.push_back(d);
      }
      continue;
    }
    bool names_ok = true;
    for (const auto& name : referenced_names(*cond)) {
      if (find_var(net.variables, name) == nullptr) {
        report("UNKNOWN_VARIABLE", "reference to undeclared '" + name + "'");
        names_ok = false;
      }
    }
    if (!names_ok) continue;
    prop.condition = *cond;
    prop.condition_text = formula;
    props.push_back(std::move(prop));
  }
  return props;
}

std::string properties_to_text(const std::vector<SafetyProperty>& props) {
  std::ostringstream os;
  for (const auto& p : props) {
    os << "// " << p.name << "\n";
    os << "A[] " << p.chart << "." << p.state << " imply " << p.condition_text
       << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Exploration
// ---------------------------------------------------------------------------

VerifyError::VerifyError(std::string c, const std::string& msg)
    : std::runtime_error(msg), code(std::move(c)) {}

namespace {

constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

struct Node {
  SystemStatus status;  // at the start of cycle `depth`
  TimerBank timers;
  int depth = 0;
  std::size_t parent = kNoParent;
  std::set<std::string> events;  // broadcast during cycle depth-1
};

struct Exploration {
  std::vector<Node> nodes;
  std::size_t expanded = 0;
  std::size_t visits = 0;
  bool stopped = false;
  std::size_t stop_node = 0;            // node being expanded at the stop
  int stop_micro = 0;                   // 0: the node's own status
  std::set<std::string> stop_events;    // events of the stopping cycle
  SystemStatus stop_status;
};

/// Visitor sees every observable micro-step status exactly once per distinct
/// (cycle-start node, event subset, micro index); returning true stops the
/// search at that status.
Exploration explore(
    const StatechartNetwork& net, int max_cycles,
    const std::set<std::string>& alphabet, const VerifyOptions& opts,
    const std::function<bool(const SystemStatus&)>& visit) {
  for (const auto& v : net.variables) {
    if (v.kind == VarKind::UnboundedInt)
      throw VerifyError("UNBOUNDED_VARIABLE",
                        "variable '" + v.name +
                            "' has no finite domain; exhaustive exploration "
                            "needs bounded variables");
  }
  if (alphabet.size() > 20)
    throw VerifyError("ALPHABET_TOO_LARGE",
                      std::to_string(alphabet.size()) +
                          " events would mean 2^" +
                          std::to_string(alphabet.size()) +
                          " environment choices per cycle");

  Exploration ex;
  Node root{initial_status(net), TimerBank(net), 0, kNoParent, {}};
  ++ex.visits;
  if (visit(root.status)) {
    ex.stopped = true;
    ex.stop_status = root.status;
    ex.nodes.push_back(std::move(root));
    return ex;
  }
  ex.nodes.push_back(std::move(root));

  std::map<std::pair<SystemStatus, TimerBank>, std::size_t> seen;
  seen[{ex.nodes[0].status, ex.nodes[0].timers}] = 0;
  std::deque<std::size_t> frontier{0};
  std::vector<std::string> events_sorted(alphabet.begin(), alphabet.end());

  while (!frontier.empty()) {
    std::size_t v = frontier.front();
    frontier.pop_front();
    if (ex.nodes[v].depth >= max_cycles) continue;
    if (ex.expanded >= opts.node_budget)
      throw VerifyError("STATE_SPACE_BUDGET_EXCEEDED",
                        "more than " + std::to_string(opts.node_budget) +
                            " distinct cycle-start statuses; raise the budget "
                            "or lower the cycle bound");
    ++ex.expanded;

    for (std::uint64_t mask = 0; mask < (1llu << events_sorted.size()); ++mask) {
      std::set<std::string> events;
      for (std::size_t i = 0; i < events_sorted.size(); ++i) {
        if (mask & (1llu << i)) events.insert(events_sorted[i]);
      }
      SystemStatus st = ex.nodes[v].status;
      TimerBank tb = ex.nodes[v].timers;
      int depth = ex.nodes[v].depth;
      auto steps = macro_cycle(net, st, events, tb);
      for (std::size_t m = 0; m < steps.size(); ++m) {
        ++ex.visits;
        if (!visit(steps[m].status)) continue;
        ex.stopped = true;
        ex.stop_node = v;
        ex.stop_micro = static_cast<int>(m) + 1;
        ex.stop_events = events;
        ex.stop_status = steps[m].status;
        return ex;
      }
      auto [it, fresh] = seen.try_emplace({st, tb}, ex.nodes.size());
      if (fresh) {
        frontier.push_back(ex.nodes.size());
        ex.nodes.push_back({std::move(st), std::move(tb), depth + 1, v, events});
      }
    }
  }
  return ex;
}

EventEnv schedule_to_node(const Exploration& ex, std::size_t node) {
  EventEnv env;
  for (std::size_t u = node; ex.nodes[u].parent != kNoParent;
       u = ex.nodes[u].parent) {
    if (!ex.nodes[u].events.empty())
      env.schedule[ex.nodes[u].depth - 1] = ex.nodes[u].events;
  }
  return env;
}

}  // namespace

std::set<SystemStatus> reachable(const StatechartNetwork& net, int max_cycles,
                                 const std::set<std::string>& alphabet,
                                 const VerifyOptions& opts) {
  std::set<SystemStatus> out;
  explore(net, max_cycles, alphabet, opts, [&](const SystemStatus& s) {
    out.insert(s);
    return false;
  });
  return out;
}

VerifyResult check_invariant(const StatechartNetwork& net,
                             const SafetyProperty& prop, int max_cycles,
                             const VerifyOptions& opts) {
  std::size_t chart_idx = net.charts.size();
  for (std::size_t i = 0; i < net.charts.size(); ++i) {
    if (net.charts[i].name == prop.chart) chart_idx = i;
  }
  if (chart_idx == net.charts.size())
    throw std::invalid_argument("no statechart named '" + prop.chart + "'");
  if (net.charts[chart_idx].find_state(prop.state) == nullptr)
    throw std::invalid_argument("statechart '" + prop.chart +
                                "' has no state '" + prop.state + "'");

  GuardContext ctx = GuardContext::none();
  auto names = net.event_names();
  std::set<std::string> alphabet(names.begin(), names.end());
  Exploration ex =
      explore(net, max_cycles, alphabet, opts,
              [&](const SystemStatus& s) {
                return s.states[chart_idx] == prop.state &&
                       !eval_bool(prop.condition, s.vars, ctx);
              });

  VerifyResult result;
  result.nodes_expanded = ex.expanded;
  result.statuses_seen = ex.visits;
  if (!ex.stopped) return result;

  result.holds = false;
  EventEnv env = schedule_to_node(ex, ex.stop_node);
  int depth = ex.nodes[ex.stop_node].depth;
  if (ex.stop_micro > 0 && !ex.stop_events.empty())
    env.schedule[depth] = ex.stop_events;

  int cycles = depth + (ex.stop_micro > 0 ? 1 : 0);
  ExecutionTrace trace = run(net, env, cycles);
  std::size_t keep = static_cast<std::size_t>(depth) * net.charts.size() +
                     static_cast<std::size_t>(ex.stop_micro);
  trace.statuses.resize(keep + 1);
  trace.labels.resize(keep);
  if (!(trace.statuses.back() == ex.stop_status))
    throw std::logic_error("counterexample replay diverged from exploration");

  result.counterexample = Counterexample{prop.name, std::move(env), std::move(trace)};
  return result;
}

std::string counterexample_to_text(const Counterexample& cex) {
  std::ostringstream os;
  os << "property " << cex.property << " violated\n";
  std::string sched = schedule_to_text(cex.schedule);
  os << "schedule:\n";
  if (sched.empty()) {
    os << "  (no events)\n";
  } else {
    std::istringstream lines(sched);
    for (std::string line; std::getline(lines, line);) os << "  " << line << "\n";
  }
  os << "trace:\n" << dump_trace(cex.trace);
  return os.str();
}

}  // namespace scforge
