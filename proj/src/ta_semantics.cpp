#include "scforge/ta_semantics.hpp"

#include <sstream>

namespace scforge {

TaRunError::TaRunError(std::string c, const std::string& msg)
    : std::runtime_error(msg), code(std::move(c)) {}

TAStatus ta_initial_status(const TimedAutomatonNetwork& ta) {
  TAStatus st;
  for (const auto& a : ta.automata) st.locations[a.name] = a.initial;
  st.vars = initial_valuation(ta.variables);
  for (const auto& v : ta.variables) {
    if (v.kind == VarKind::Clock) st.clocks[v.name] = 0;
  }
  return st;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

bool guard_has_raw_atoms(const Expr& e) {
  bool found = false;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, EventRef> || std::is_same_v<T, TriggerRef>) {
            found = true;
          } else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, Arith> ||
                               std::is_same_v<T, LogicalAnd> ||
                               std::is_same_v<T, LogicalOr>) {
            walk(n.lhs);
            walk(n.rhs);
          } else if constexpr (std::is_same_v<T, LogicalNot>) {
            walk(n.operand);
          }
        },
        x.node().node);
  };
  walk(e);
  return found;
}

struct SenderInfo {
  std::size_t automaton = 0;
  const EdgeDef* edge = nullptr;
  bool timer = false;
  std::string clock;
  std::int64_t amount = 0;
  std::string offering_location;
};

/// channel -> its unique sending automaton; empty on malformed networks.
std::map<std::string, SenderInfo> index_senders(const TimedAutomatonNetwork& ta,
                                                std::vector<Diagnostic>* diags) {
  std::map<std::string, SenderInfo> senders;
  auto report = [&](const std::string& code, const std::string& msg) {
    if (diags != nullptr) diags->push_back({code, msg, 0, 0});
  };
  for (std::size_t i = 0; i < ta.automata.size(); ++i) {
    const TimedAutomatonDef& a = ta.automata[i];
    if (a.role == AutomatonRole::Transformed) continue;
    if (a.edges.size() != 1) {
      report("TA_BAD_AUX", a.name + ": auxiliary automata have exactly one edge");
      continue;
    }
    const EdgeDef& edge = a.edges[0];
    EdgeSync sync = edge_sync(edge);
    if (sync.kind != SyncKind::Send) {
      report("TA_BAD_AUX", a.name + ": the auxiliary edge must send on a channel");
      continue;
    }
    SenderInfo info;
    info.automaton = i;
    info.edge = &edge;
    if (a.role == AutomatonRole::TimerAux) {
      const LocationDef* src = a.find_location(edge.source);
      if (src == nullptr || !src->invariant.has_value()) {
        report("TA_BAD_AUX",
               a.name + ": the tick edge must leave an invariant-bounded location");
        continue;
      }
      info.timer = true;
      info.clock = src->invariant->clock;
      info.amount = src->invariant->bound;
      info.offering_location = edge.source;
    }
    if (senders.count(sync.channel) != 0) {
      report("TA_BAD_SYNC", "channel '" + sync.channel + "' has two senders");
      continue;
    }
    senders[sync.channel] = info;
  }
  return senders;
}

}  // namespace

std::vector<Diagnostic> ta_validate(const TimedAutomatonNetwork& ta) {
  std::vector<Diagnostic> diags;
  auto report = [&](const std::string& code, const std::string& msg) {
    diags.push_back({code, msg, 0, 0});
  };

  for (const auto& a : ta.automata) {
    for (const auto& e : a.edges) {
      if (guard_has_raw_atoms(e.guard))
        report("TA_RAW_ATOM",
               a.name + "." + e.id +
                   ": guard still carries an event or timing-trigger atom, which "
                   "is not executable in a timed automaton");
      if (a.role == AutomatonRole::Transformed &&
          edge_sync(e).kind == SyncKind::Send)
        report("TA_BAD_SYNC", a.name + "." + e.id + ": transformed edges cannot send");
    }
  }

  bool has_transformed = false;
  for (const auto& a : ta.automata)
    has_transformed |= a.role == AutomatonRole::Transformed;
  if (has_transformed &&
      (ta.alpha_var.empty() || ta.lockstep_n < 1 ||
       find_var(ta.variables, ta.alpha_var) == nullptr))
    report("TA_NO_LOCKSTEP",
           "the network has no lockstep index; the scheduling rule did not run");

  auto senders = index_senders(ta, &diags);
  std::set<std::string> declared_channels;
  for (const auto& v : ta.variables) {
    if (v.kind == VarKind::Channel) declared_channels.insert(v.name);
  }
  for (const auto& a : ta.automata) {
    if (a.role != AutomatonRole::Transformed) continue;
    for (const auto& e : a.edges) {
      for (const auto& chan : referenced_channels(e.guard)) {
        if (declared_channels.count(chan) == 0)
          report("TA_BAD_SYNC",
                 a.name + "." + e.id + ": undeclared channel '" + chan + "'");
      }
      EdgeSync sync = edge_sync(e);
      if (sync.kind == SyncKind::Receive && senders.count(sync.channel) == 0)
        report("TA_BAD_SYNC", a.name + "." + e.id + ": nobody sends on '" +
                                  sync.channel + "'");
    }
  }
  return diags;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

namespace {

void apply_edge(const TimedAutomatonNetwork& ta, TAStatus& st,
                const TimedAutomatonDef& a, const EdgeDef& e) {
  st.vars = apply_actions(e.action, st.vars, ta.variables, &st.clocks);
  for (const auto& c : e.clock_resets) st.clocks[c] = 0;
  st.locations[a.name] = e.target;
}

std::set<std::string> due_timer_channels(const std::map<std::string, SenderInfo>& senders,
                                         const TimedAutomatonNetwork& ta,
                                         const TAStatus& st) {
  std::set<std::string> due;
  for (const auto& [chan, info] : senders) {
    if (!info.timer) continue;
    const TimedAutomatonDef& aux = ta.automata[info.automaton];
    if (st.locations.at(aux.name) != info.offering_location) continue;
    auto it = st.clocks.find(info.clock);
    if (it != st.clocks.end() && it->second >= info.amount) due.insert(chan);
  }
  return due;
}

}  // namespace

TaTrace ta_run(const TimedAutomatonNetwork& ta, const EventEnv& env, int horizon) {
  auto problems = ta_validate(ta);
  if (!problems.empty()) throw TaRunError(problems[0].code, problems[0].message);

  auto senders = index_senders(ta, nullptr);
  std::vector<std::size_t> transformed;
  for (std::size_t i = 0; i < ta.automata.size(); ++i) {
    if (ta.automata[i].role == AutomatonRole::Transformed) transformed.push_back(i);
  }

  TaTrace trace;
  trace.lockstep_n = ta.lockstep_n;
  TAStatus st = ta_initial_status(ta);
  trace.entries.push_back({TaEntryKind::Init, st, "-"});

  for (int cycle = 0; cycle < horizon; ++cycle) {
    std::set<std::string> event_offers = env.at(cycle);

    for (int slot = 0; slot < ta.lockstep_n; ++slot) {
      std::set<std::string> offers = event_offers;
      auto due = due_timer_channels(senders, ta, st);
      offers.insert(due.begin(), due.end());
      GuardContext ctx = GuardContext::timed(offers);

      const TimedAutomatonDef* fired_automaton = nullptr;
      const EdgeDef* fired = nullptr;
      for (std::size_t ai : transformed) {
        const TimedAutomatonDef& a = ta.automata[ai];
        const std::string& loc = st.locations.at(a.name);
        for (const EdgeDef* e : a.outgoing(loc)) {
          if (!eval_bool(e->guard, st.vars, ctx, &st.clocks)) continue;
          if (fired != nullptr)
            throw TaRunError("AMBIGUOUS_STEP",
                             "cycle " + std::to_string(cycle) + " slot " +
                                 std::to_string(slot + 1) + ": both " +
                                 fired_automaton->name + "." + fired->id + " and " +
                                 a.name + "." + e->id + " are eligible");
          fired_automaton = &a;
          fired = e;
        }
      }
      if (fired == nullptr)
        throw TaRunError("NO_ELIGIBLE_EDGE",
                         "cycle " + std::to_string(cycle) + " slot " +
                             std::to_string(slot + 1) + ": no edge is eligible");

      // Receiver first, then the matching sender.
      apply_edge(ta, st, *fired_automaton, *fired);
      EdgeSync sync = edge_sync(*fired);
      if (sync.kind == SyncKind::Receive) {
        const SenderInfo& sender = senders.at(sync.channel);
        apply_edge(ta, st, ta.automata[sender.automaton], *sender.edge);
      }
      trace.entries.push_back(
          {TaEntryKind::Step, st, fired_automaton->name + "." + fired->id});
    }

    // Due but unconsumed timers fire alone, in network order, so the coming
    // delay stays legal.
    for (std::size_t ai = 0; ai < ta.automata.size(); ++ai) {
      if (ta.automata[ai].role != AutomatonRole::TimerAux) continue;
      for (const auto& [chan, info] : senders) {
        if (info.automaton != ai || !info.timer) continue;
        if (due_timer_channels(senders, ta, st).count(chan) == 0) continue;
        apply_edge(ta, st, ta.automata[ai], *info.edge);
        trace.entries.push_back({TaEntryKind::Aux, st, info.edge->id});
      }
    }

    // One time unit passes; every location invariant must survive it.
    for (const auto& a : ta.automata) {
      const LocationDef* loc = a.find_location(st.locations.at(a.name));
      if (loc == nullptr || !loc->invariant.has_value()) continue;
      std::int64_t next = st.clocks[loc->invariant->clock] + 1;
      if (next > loc->invariant->bound)
        throw TaRunError("INVARIANT_VIOLATION",
                         a.name + "." + loc->id + ": delaying to " +
                             std::to_string(next) + " breaks " +
                             loc->invariant->clock + "<=" +
                             std::to_string(loc->invariant->bound) + " at cycle " +
                             std::to_string(cycle));
    }
    for (auto& [name, value] : st.clocks) value += 1;
    trace.entries.push_back({TaEntryKind::Delay, st, "delay 1"});
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Dump
// ---------------------------------------------------------------------------

std::string dump_ta_trace(const TimedAutomatonNetwork& ta, const TaTrace& trace) {
  std::ostringstream os;
  int cycle = 0;
  int step = 0;
  for (const auto& entry : trace.entries) {
    switch (entry.kind) {
      case TaEntryKind::Init: os << "0.0"; break;
      case TaEntryKind::Step: os << cycle << "." << ++step; break;
      case TaEntryKind::Aux: os << cycle << ".a"; break;
      case TaEntryKind::Delay: os << cycle << ".d"; break;
    }
    os << " | (";
    bool first = true;
    for (const auto& a : ta.automata) {
      if (!first) os << ", ";
      auto it = entry.status.locations.find(a.name);
      os << (it == entry.status.locations.end() ? "?" : it->second);
      first = false;
    }
    os << ") | ";
    if (entry.status.vars.values.empty()) {
      os << "-";
    } else {
      first = true;
      for (const auto& [name, value] : entry.status.vars.values) {
        if (!first) os << ", ";
        os << name << "=" << render_value(value);
        first = false;
      }
    }
    os << " | ";
    if (entry.status.clocks.empty()) {
      os << "-";
    } else {
      first = true;
      for (const auto& [name, value] : entry.status.clocks) {
        if (!first) os << ", ";
        os << name << "=" << value;
        first = false;
      }
    }
    os << " | " << entry.label << "\n";
    if (entry.kind == TaEntryKind::Delay) {
      ++cycle;
      step = 0;
    }
  }
  return os.str();
}

}  // namespace scforge
