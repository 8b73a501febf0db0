#include "scforge/equivalence.hpp"

#include <algorithm>
#include <future>
#include <random>
#include <sstream>

namespace scforge {

namespace {

std::map<std::string, std::string> invert(
    const std::map<std::string, std::string>& m) {
  std::map<std::string, std::string> inv;
  for (const auto& [k, v] : m) inv[v] = k;
  return inv;
}

}  // namespace

std::optional<ExecutionTrace> project_ta_trace(const TimedAutomatonNetwork& ta,
                                               const TransformMap& map,
                                               const TaTrace& trace,
                                               std::vector<Diagnostic>& diags) {
  auto mismatch = [&](const std::string& msg) -> std::optional<ExecutionTrace> {
    diags.push_back({"MAP_MISMATCH", msg, 0, 0});
    return std::nullopt;
  };

  // Transformed automata in rho order carry the chart ordering.
  std::vector<const TimedAutomatonDef*> transformed;
  for (const auto& a : ta.automata) {
    if (a.role == AutomatonRole::Transformed) transformed.push_back(&a);
  }
  std::sort(transformed.begin(), transformed.end(),
            [](const auto* a, const auto* b) { return a->rho < b->rho; });

  auto automaton_to_chart = invert(map.chart_to_automaton);
  if (automaton_to_chart.size() != map.chart_to_automaton.size())
    return mismatch("two charts map to the same automaton");
  if (automaton_to_chart.size() != transformed.size())
    return mismatch("the map covers " +
                    std::to_string(map.chart_to_automaton.size()) +
                    " charts but the network has " +
                    std::to_string(transformed.size()) +
                    " transformed automata");
  for (const auto* a : transformed) {
    if (automaton_to_chart.count(a->name) == 0)
      return mismatch("automaton '" + a->name + "' has no source chart");
  }
  if (ta.alpha_var.empty())
    return mismatch("the network has no lockstep index to project");
  if (ta.lockstep_n != static_cast<int>(transformed.size()))
    return mismatch("lockstep width disagrees with the transformed automata");

  auto location_to_state = invert(map.state_to_location);
  auto edge_to_transition = invert(map.transition_to_edge);

  ExecutionTrace out;
  out.charts = static_cast<int>(transformed.size());

  for (const auto& entry : trace.entries) {
    if (entry.kind != TaEntryKind::Init && entry.kind != TaEntryKind::Step)
      continue;

    SystemStatus status;
    for (const auto* a : transformed) {
      auto loc_it = entry.status.locations.find(a->name);
      if (loc_it == entry.status.locations.end())
        return mismatch("the trace does not cover automaton '" + a->name + "'");
      auto st_it = location_to_state.find(a->name + "." + loc_it->second);
      if (st_it == location_to_state.end())
        return mismatch("location '" + a->name + "." + loc_it->second +
                        "' has no source state");
      status.states.push_back(st_it->second.substr(st_it->second.find('.') + 1));
    }
    for (const auto& [orig, ta_name] : map.variable_map) {
      auto v_it = entry.status.vars.values.find(ta_name);
      if (v_it == entry.status.vars.values.end())
        return mismatch("the trace carries no value for '" + ta_name + "'");
      status.vars.values[orig] = v_it->second;
    }
    auto alpha_it = entry.status.vars.values.find(ta.alpha_var);
    if (alpha_it == entry.status.vars.values.end() ||
        !std::holds_alternative<std::int64_t>(alpha_it->second))
      return mismatch("the trace carries no lockstep index value");
    status.exec_index =
        static_cast<int>(std::get<std::int64_t>(alpha_it->second));

    if (entry.kind == TaEntryKind::Step) {
      auto tr_it = edge_to_transition.find(entry.label);
      out.labels.push_back(tr_it == edge_to_transition.end() ? kStutterLabel
                                                             : tr_it->second);
    }
    out.statuses.push_back(std::move(status));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

std::string render_status(const SystemStatus& status) {
  std::ostringstream os;
  os << "((";
  for (std::size_t i = 0; i < status.states.size(); ++i) {
    if (i > 0) os << ", ";
    os << status.states[i];
  }
  os << "), {";
  bool first = true;
  for (const auto& [name, value] : status.vars.values) {
    if (!first) os << ", ";
    os << name << "=" << render_value(value);
    first = false;
  }
  os << "}, next=" << status.exec_index << ")";
  return os.str();
}

EquivalenceReport check_traces(const ExecutionTrace& left,
                               const ExecutionTrace& right) {
  EquivalenceReport report;
  report.schedules_tested = 1;
  report.horizon = static_cast<int>(left.cycles());

  auto label_at = [](const ExecutionTrace& t, std::size_t status_index) {
    return status_index == 0 || status_index > t.labels.size()
               ? std::string("-")
               : t.labels[status_index - 1];
  };
  auto diverge = [&](std::size_t index, const std::string& msg) {
    Divergence d;
    d.status_index = static_cast<int>(index);
    if (index < left.statuses.size()) d.left_status = render_status(left.statuses[index]);
    if (index < right.statuses.size())
      d.right_status = render_status(right.statuses[index]);
    d.left_label = label_at(left, index);
    d.right_label = label_at(right, index);
    d.message = msg;
    report.equivalent = false;
    report.first_divergence = std::move(d);
  };

  if (left.charts != right.charts) {
    diverge(0, "micro-steps per cycle differ (" + std::to_string(left.charts) +
                   " vs " + std::to_string(right.charts) + ")");
    return report;
  }
  std::size_t n = std::min(left.statuses.size(), right.statuses.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (left.statuses[i] == right.statuses[i]) continue;
    diverge(i, "statuses differ at index " + std::to_string(i));
    return report;
  }
  if (left.statuses.size() != right.statuses.size()) {
    diverge(n, "trace lengths differ (" + std::to_string(left.statuses.size()) +
                   " vs " + std::to_string(right.statuses.size()) + " statuses)");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Model-level driver
// ---------------------------------------------------------------------------

namespace {

std::optional<Divergence> compare_under_schedule(
    const StatechartNetwork& net, const TimedAutomatonNetwork& ta,
    const TransformMap& map, const EventEnv& env, int horizon) {
  auto fail = [&](const std::string& msg) {
    Divergence d;
    d.message = msg;
    d.schedule_text = schedule_to_text(env);
    return d;
  };

  ExecutionTrace sc_trace;
  try {
    sc_trace = run(net, env, horizon);
  } catch (const std::exception& e) {
    return fail(std::string("source model run failed: ") + e.what());
  }

  TaTrace ta_trace;
  try {
    ta_trace = ta_run(ta, env, horizon);
  } catch (const TaRunError& e) {
    return fail("timed network run failed [" + e.code + "]: " + e.what());
  } catch (const std::exception& e) {
    return fail(std::string("timed network run failed: ") + e.what());
  }

  std::vector<Diagnostic> diags;
  auto projected = project_ta_trace(ta, map, ta_trace, diags);
  if (!projected.has_value())
    return fail("projection failed: " +
                (diags.empty() ? std::string("unknown") : diags[0].message));

  EquivalenceReport rep = check_traces(sc_trace, *projected);
  if (rep.equivalent) return std::nullopt;
  Divergence d = *rep.first_divergence;
  d.schedule_text = schedule_to_text(env);
  return d;
}

}  // namespace

EquivalenceReport check_model_equivalence(const StatechartNetwork& net,
                                          const TimedAutomatonNetwork& ta,
                                          const TransformMap& map,
                                          const std::vector<EventEnv>& schedules,
                                          int horizon, int jobs) {
  EquivalenceReport report;
  report.schedules_tested = static_cast<int>(schedules.size());
  report.horizon = horizon;

  std::vector<std::optional<Divergence>> outcomes(schedules.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
      outcomes[k] = compare_under_schedule(net, ta, map, schedules[k], horizon);
  };

  std::size_t workers = jobs < 1 ? 1 : static_cast<std::size_t>(jobs);
  workers = std::min(workers, std::max<std::size_t>(schedules.size(), 1));
  if (workers <= 1) {
    work(0, schedules.size());
  } else {
    std::size_t chunk = (schedules.size() + workers - 1) / workers;
    std::vector<std::future<void>> futures;
    for (std::size_t begin = 0; begin < schedules.size(); begin += chunk) {
      std::size_t end = std::min(begin + chunk, schedules.size());
      futures.push_back(
          std::async(std::launch::async, [&work, begin, end] { work(begin, end); }));
    }
    for (auto& f : futures) f.get();
  }

  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (!outcomes[k].has_value()) continue;
    report.equivalent = false;
    report.first_divergence = *outcomes[k];
    report.first_divergence->schedule_index = static_cast<int>(k);
    break;
  }
  return report;
}

std::vector<EventEnv> random_schedules(const std::set<std::string>& events,
                                       std::uint64_t seed, int count,
                                       int horizon) {
  std::mt19937_64 rng(seed);
  std::vector<EventEnv> out;
  out.reserve(static_cast<std::size_t>(count < 0 ? 0 : count));
  for (int k = 0; k < count; ++k) {
    EventEnv env;
    for (int cycle = 0; cycle < horizon; ++cycle) {
      for (const auto& e : events) {  // set order: stable across runs
        if (rng() % 10 < 3) env.schedule[cycle].insert(e);
      }
    }
    out.push_back(std::move(env));
  }
  return out;
}

std::string equivalence_report_to_text(const EquivalenceReport& report) {
  std::ostringstream os;
  os << "verdict: " << (report.equivalent ? "equivalent" : "divergent") << "\n";
  os << "schedules tested: " << report.schedules_tested << "\n";
  os << "horizon: " << report.horizon << "\n";
  if (report.seed.has_value()) os << "seed: " << *report.seed << "\n";
  if (report.first_divergence.has_value()) {
    const Divergence& d = *report.first_divergence;
    os << "first divergence:\n";
    if (d.schedule_index >= 0)
      os << "  schedule index: " << d.schedule_index << "\n";
    if (d.status_index >= 0) os << "  status index: " << d.status_index << "\n";
    if (!d.left_status.empty()) os << "  source:      " << d.left_status << "\n";
    if (!d.right_status.empty())
      os << "  transformed: " << d.right_status << "\n";
    if (!d.left_label.empty() || !d.right_label.empty())
      os << "  labels: " << d.left_label << " vs " << d.right_label << "\n";
    os << "  message: " << d.message << "\n";
    os << "  schedule:" << (d.schedule_text.empty() ? " (empty)\n" : "\n");
    std::istringstream lines(d.schedule_text);
    for (std::string line; std::getline(lines, line);)
      os << "    " << line << "\n";
  }
  return os.str();
}

}  // namespace scforge
