#include "scforge/sc_semantics.hpp"

#include <algorithm>
#include <sstream>

namespace scforge {

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

EventEnv parse_schedule(const std::string& text, const StatechartNetwork& net,
                        std::vector<Diagnostic>& diags) {
  EventEnv env;
  auto events = net.event_names();
  std::set<std::string> known(events.begin(), events.end());

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto pos = line.find("//"); pos != std::string::npos) line.resize(pos);
    line = strip(line);
    if (line.empty()) continue;

    if (line.rfind("cycle", 0) != 0) {
      diags.push_back({"SYNTAX_ERROR", "expected 'cycle <k>: ...'", lineno, 1});
      continue;
    }
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) {
      diags.push_back({"SYNTAX_ERROR", "expected ':' after the cycle number", lineno, 1});
      continue;
    }
    std::string num = strip(line.substr(5, colon - 5));
    int cycle = 0;
    try {
      std::size_t used = 0;
      cycle = std::stoi(num, &used);
      if (used != num.size()) throw std::invalid_argument(num);
    } catch (const std::exception&) {
      diags.push_back({"SYNTAX_ERROR", "bad cycle number '" + num + "'", lineno, 1});
      continue;
    }
    if (cycle < 0) {
      diags.push_back({"SYNTAX_ERROR", "cycle numbers are non-negative", lineno, 1});
      continue;
    }

    std::string rest = line.substr(colon + 1);
    std::istringstream items(rest);
    std::string item;
    while (std::getline(items, item, ',')) {
      item = strip(item);
      if (item.empty()) continue;
      if (known.count(item) == 0) {
        diags.push_back({"UNKNOWN_EVENT", "'" + item + "' is not a declared event",
                         lineno, 1});
        continue;
      }
      env.schedule[cycle].insert(item);
    }
    env.schedule.try_emplace(cycle);  // `cycle 3:` with no events is valid
  }
  return env;
}

std::string schedule_to_text(const EventEnv& env) {
  std::ostringstream os;
  for (const auto& [cycle, events] : env.schedule) {
    if (events.empty()) continue;
    os << "cycle " << cycle << ":";
    bool first = true;
    for (const auto& e : events) {
      os << (first ? " " : ", ") << e;
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Timers
// ---------------------------------------------------------------------------

TimerBank::TimerBank(const StatechartNetwork& net) {
  auto occs = trigger_occurrences(net);
  std::size_t count = occs.size();
  slots.resize(count);
  for (const auto& occ : occs) {
    if (occ.id < 0 || static_cast<std::size_t>(occ.id) >= count)
      throw std::runtime_error("trigger occurrence ids are not dense; renumber them");
    slots[static_cast<std::size_t>(occ.id)] = TimerSlot{occ.kind, occ.amount, 0, true};
  }
}

std::set<int> TimerBank::ticking() const {
  std::set<int> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const TimerSlot& s = slots[i];
    if (s.armed && s.clock >= s.amount) out.insert(static_cast<int>(i));
  }
  return out;
}

void TimerBank::end_cycle() {
  for (TimerSlot& s : slots) {
    if (s.armed && s.clock >= s.amount) {
      if (s.kind == TriggerKind::Every) {
        s.clock = 0;
      } else {
        s.armed = false;
        s.clock = 0;
      }
    }
    if (s.armed) s.clock += 1;
  }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

SystemStatus initial_status(const StatechartNetwork& net) {
  SystemStatus st;
  for (const auto& chart : net.charts) st.states.push_back(chart.initial);
  st.vars = initial_valuation(net.variables);
  st.exec_index = 1;
  return st;
}

MicroStep micro_step(const StatechartNetwork& net, const SystemStatus& status,
                     const std::set<std::string>& events,
                     const std::set<int>& ticking) {
  int n = static_cast<int>(net.charts.size());
  if (status.exec_index < 1 || status.exec_index > n)
    throw std::runtime_error("execution index out of range");
  std::size_t idx = static_cast<std::size_t>(status.exec_index - 1);
  const StatechartDef& chart = net.charts[idx];
  const std::string& state = status.states[idx];

  std::vector<const TransitionDef*> candidates = chart.outgoing(state);
  std::sort(candidates.begin(), candidates.end(),
            [](const TransitionDef* a, const TransitionDef* b) {
              return a->priority < b->priority;
            });

  GuardContext ctx = GuardContext::statechart(events, ticking);
  const TransitionDef* fired = nullptr;
  for (const TransitionDef* t : candidates) {
    if (eval_bool(t->guard, status.vars, ctx)) {
      fired = t;
      break;
    }
  }

  MicroStep out;
  out.status = status;
  if (fired == nullptr) {
    out.label = kStutterLabel;
  } else {
    const StateDef* src = chart.find_state(fired->source);
    const StateDef* dst = chart.find_state(fired->target);
    ActionSeq composite = ActionSeq::concat(
        ActionSeq::concat(src != nullptr ? src->exit : ActionSeq{}, fired->action),
        dst != nullptr ? dst->entry : ActionSeq{});
    out.status.vars = apply_actions(composite, status.vars, net.variables);
    out.status.states[idx] = fired->target;
    out.label = chart.name + "." + fired->id;
  }
  out.status.exec_index = status.exec_index % n + 1;
  return out;
}

std::vector<MicroStep> macro_cycle(const StatechartNetwork& net, SystemStatus& status,
                                   const std::set<std::string>& events,
                                   TimerBank& timers) {
  std::set<int> ticking = timers.ticking();
  std::vector<MicroStep> steps;
  steps.reserve(net.charts.size());
  for (std::size_t i = 0; i < net.charts.size(); ++i) {
    MicroStep step = micro_step(net, status, events, ticking);
    status = step.status;
    steps.push_back(std::move(step));
  }
  timers.end_cycle();
  return steps;
}

ExecutionTrace run(const StatechartNetwork& net, const EventEnv& env, int horizon) {
  ExecutionTrace trace;
  trace.charts = static_cast<int>(net.charts.size());
  SystemStatus status = initial_status(net);
  TimerBank timers(net);
  trace.statuses.push_back(status);
  for (int cycle = 0; cycle < horizon; ++cycle) {
    auto steps = macro_cycle(net, status, env.at(cycle), timers);
    for (auto& step : steps) {
      trace.statuses.push_back(step.status);
      trace.labels.push_back(step.label);
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Dumps
// ---------------------------------------------------------------------------

namespace {

std::string render_status_row(const SystemStatus& st) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < st.states.size(); ++i) {
    if (i > 0) os << ", ";
    os << st.states[i];
  }
  os << ") | ";
  if (st.vars.values.empty()) {
    os << "-";
  } else {
    bool first = true;
    for (const auto& [name, value] : st.vars.values) {
      if (!first) os << ", ";
      os << name << "=" << render_value(value);
      first = false;
    }
  }
  return os.str();
}

}  // namespace

std::string dump_trace(const ExecutionTrace& trace) {
  std::ostringstream os;
  if (trace.statuses.empty()) return {};
  os << "0.0 | " << render_status_row(trace.statuses[0]) << " | -\n";
  int n = trace.charts;
  for (std::size_t k = 0; k < trace.labels.size(); ++k) {
    std::size_t cycle = n == 0 ? 0 : k / static_cast<std::size_t>(n);
    std::size_t micro = n == 0 ? 0 : k % static_cast<std::size_t>(n) + 1;
    os << cycle << "." << micro << " | " << render_status_row(trace.statuses[k + 1])
       << " | " << trace.labels[k] << "\n";
  }
  return os.str();
}

}  // namespace scforge
