#include "scforge/transform.hpp"

#include <algorithm>
#include <sstream>

namespace scforge {

const LocationDef* TimedAutomatonDef::find_location(const std::string& id) const {
  for (const auto& l : locations) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

std::vector<const EdgeDef*> TimedAutomatonDef::outgoing(const std::string& location) const {
  std::vector<const EdgeDef*> out;
  for (const auto& e : edges) {
    if (e.source == location) out.push_back(&e);
  }
  return out;
}

const TimedAutomatonDef* TimedAutomatonNetwork::find_automaton(
    const std::string& name) const {
  for (const auto& a : automata) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Transformation rules
// ---------------------------------------------------------------------------

namespace {

std::string unique_name(const std::string& base, const std::set<std::string>& taken) {
  if (taken.count(base) == 0) return base;
  for (int i = 2;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (taken.count(candidate) == 0) return candidate;
  }
}

/// Conjunction that drops literal-true operands so dumps stay readable.
Expr land_simplified(const Expr& a, const Expr& b) {
  if (expr_equal(a, Expr::bool_lit(true))) return b;
  if (expr_equal(b, Expr::bool_lit(true))) return a;
  return Expr::land(a, b);
}

// Rule 1: skeleton copy. One automaton per chart with the same locations,
// initial location and edge endpoints; guards and actions come later.
void apply_rule1(const StatechartNetwork& net, TimedAutomatonNetwork& ta,
                 TransformMap& map) {
  ta.variables = net.variables;
  for (const auto& v : net.variables) {
    if (is_valued(v.kind)) map.variable_map[v.name] = v.name;
  }
  for (const auto& chart : net.charts) {
    TimedAutomatonDef a;
    a.name = chart.name;
    a.role = AutomatonRole::Transformed;
    a.rho = chart.priority;
    for (const auto& s : chart.states) {
      a.locations.push_back({s.id, std::nullopt});
      map.state_to_location[chart.name + "." + s.id] = a.name + "." + s.id;
    }
    a.initial = chart.initial;
    for (const auto& t : chart.transitions) {
      EdgeDef e;
      e.id = t.id;
      e.source = t.source;
      e.target = t.target;
      e.guard = Expr::bool_lit(true);
      a.edges.push_back(std::move(e));
      map.transition_to_edge[chart.name + "." + t.id] = a.name + "." + t.id;
    }
    map.chart_to_automaton[chart.name] = a.name;
    ta.automata.push_back(std::move(a));
  }
}

// Rule 2: every edge gets the composite action <exit; transition; entry> of
// its source transition, applied atomically left to right.
void apply_rule2(const StatechartNetwork& net, TimedAutomatonNetwork& ta) {
  for (std::size_t ci = 0; ci < net.charts.size(); ++ci) {
    const StatechartDef& chart = net.charts[ci];
    TimedAutomatonDef& a = ta.automata[ci];
    for (std::size_t ti = 0; ti < chart.transitions.size(); ++ti) {
      const TransitionDef& t = chart.transitions[ti];
      const StateDef* src = chart.find_state(t.source);
      const StateDef* dst = chart.find_state(t.target);
      a.edges[ti].action = ActionSeq::concat(
          ActionSeq::concat(src != nullptr ? src->exit : ActionSeq{}, t.action),
          dst != nullptr ? dst->entry : ActionSeq{});
    }
  }
}

// Rule 3: guards are copied verbatim (event and trigger atoms still raw).
void apply_rule3(const StatechartNetwork& net, TimedAutomatonNetwork& ta) {
  for (std::size_t ci = 0; ci < net.charts.size(); ++ci) {
    const StatechartDef& chart = net.charts[ci];
    TimedAutomatonDef& a = ta.automata[ci];
    for (std::size_t ti = 0; ti < chart.transitions.size(); ++ti)
      a.edges[ti].guard = chart.transitions[ti].guard;
  }
}

std::set<std::string> automaton_names(const TimedAutomatonNetwork& ta) {
  std::set<std::string> names;
  for (const auto& a : ta.automata) names.insert(a.name);
  return names;
}

// Rule 4: every event becomes a broadcast channel plus a one-location
// automaton that offers it continuously; event atoms become receives.
void apply_rule4(TimedAutomatonNetwork& ta, TransformMap& map) {
  std::set<std::string> taken = automaton_names(ta);
  for (auto& v : ta.variables) {
    if (v.kind != VarKind::Event) continue;
    v.kind = VarKind::Channel;
    const std::string& chan = v.name;
    map.event_channel[chan] = chan;

    TimedAutomatonDef aux;
    aux.name = unique_name("U_" + chan, taken);
    taken.insert(aux.name);
    aux.role = AutomatonRole::EventAux;
    std::string loc = "s0_" + chan;
    aux.locations.push_back({loc, std::nullopt});
    aux.initial = loc;
    EdgeDef emit;
    emit.id = "emit_" + chan;
    emit.source = loc;
    emit.target = loc;
    emit.guard = Expr::chan_send(chan);
    aux.edges.push_back(std::move(emit));
    ta.automata.push_back(std::move(aux));
  }
  for (auto& a : ta.automata) {
    if (a.role != AutomatonRole::Transformed) continue;
    for (auto& e : a.edges) {
      ExprRewriter rw;
      rw.on_event = [&](const EventRef& ev) {
        auto it = map.event_channel.find(ev.name);
        return it == map.event_channel.end() ? Expr::event(ev.name)
                                             : Expr::chan_recv(it->second);
      };
      e.guard = rewrite_expr(e.guard, rw);
    }
  }
}

// Rule 5: every trigger occurrence gets a fresh clock, a fresh channel and a
// small clock automaton; the trigger atom becomes a receive on that channel.
void apply_rule5(const StatechartNetwork& net, TimedAutomatonNetwork& ta,
                 TransformMap& map) {
  std::set<std::string> taken_vars;
  for (const auto& v : ta.variables) taken_vars.insert(v.name);
  std::set<std::string> taken_automata = automaton_names(ta);

  auto occs = trigger_occurrences(net);
  std::sort(occs.begin(), occs.end(),
            [](const TriggerOccurrence& a, const TriggerOccurrence& b) {
              return a.id < b.id;
            });
  for (const auto& occ : occs) {
    std::string base = (occ.kind == TriggerKind::After ? "after" : "every") +
                       std::to_string(occ.amount) + "s";
    std::string chan = unique_name(base, taken_vars);
    taken_vars.insert(chan);
    std::string clock = unique_name("c" + std::to_string(occ.id + 1), taken_vars);
    taken_vars.insert(clock);
    ta.variables.push_back({chan, VarKind::Channel, 0, 0, std::int64_t{0}});
    ta.variables.push_back({clock, VarKind::Clock, 0, 0, std::int64_t{0}});
    map.occurrence_channel[occ.id] = chan;
    map.occurrence_clock[occ.id] = clock;

    TimedAutomatonDef aux;
    aux.name = unique_name("U_" + chan, taken_automata);
    taken_automata.insert(aux.name);
    aux.role = AutomatonRole::TimerAux;
    std::string start = "s0_" + chan;
    aux.locations.push_back({start, ClockConstraint{clock, occ.amount}});
    aux.initial = start;
    EdgeDef tick;
    tick.id = "tick_" + chan;
    tick.source = start;
    tick.guard = Expr::land(Expr::chan_send(chan),
                            Expr::cmp(CmpOp::Eq, Expr::var(clock),
                                      Expr::int_lit(occ.amount)));
    if (occ.kind == TriggerKind::Every) {
      tick.target = start;
      tick.clock_resets.push_back(clock);
    } else {
      std::string done = "s1_" + chan;
      aux.locations.push_back({done, std::nullopt});
      tick.target = done;
    }
    aux.edges.push_back(std::move(tick));
    ta.automata.push_back(std::move(aux));
  }

  for (auto& a : ta.automata) {
    if (a.role != AutomatonRole::Transformed) continue;
    for (auto& e : a.edges) {
      ExprRewriter rw;
      rw.on_trigger = [&](const TriggerRef& t) {
        auto it = map.occurrence_channel.find(t.occurrence);
        return it == map.occurrence_channel.end()
                   ? Expr::trigger(t.kind, t.amount, t.occurrence)
                   : Expr::chan_recv(it->second);
      };
      e.guard = rewrite_expr(e.guard, rw);
    }
  }
}

// Rule 6: priority resolution. Each edge's guard is conjoined with the
// negations of its strictly-higher-priority siblings, in ascending priority
// order, so overlapping guards become mutually exclusive.
void apply_rule6(const StatechartNetwork& net, TimedAutomatonNetwork& ta) {
  for (std::size_t ci = 0; ci < net.charts.size(); ++ci) {
    const StatechartDef& chart = net.charts[ci];
    TimedAutomatonDef& a = ta.automata[ci];
    std::map<std::string, int> priority_of;
    for (const auto& t : chart.transitions) priority_of[t.id] = t.priority;

    for (const auto& loc : a.locations) {
      std::vector<EdgeDef*> outs;
      for (auto& e : a.edges) {
        if (e.source == loc.id) outs.push_back(&e);
      }
      if (outs.size() < 2) continue;
      std::sort(outs.begin(), outs.end(), [&](const EdgeDef* x, const EdgeDef* y) {
        return priority_of.at(x->id) < priority_of.at(y->id);
      });
      std::vector<Expr> originals;
      originals.reserve(outs.size());
      for (const EdgeDef* e : outs) originals.push_back(e->guard);
      for (std::size_t k = 1; k < outs.size(); ++k) {
        Expr g = originals[k];
        for (std::size_t j = 0; j < k; ++j)
          g = land_simplified(g, Expr::lnot(originals[j]));
        outs[k]->guard = g;
      }
    }
  }
}

// Rule 7: lockstep scheduling. A shared index walks the automata in priority
// order; every location gets a stutter self-loop so each automaton moves
// exactly once per round.
void apply_rule7(TimedAutomatonNetwork& ta) {
  int n = 0;
  for (const auto& a : ta.automata) {
    if (a.role == AutomatonRole::Transformed) ++n;
  }
  std::set<std::string> taken_vars;
  for (const auto& v : ta.variables) taken_vars.insert(v.name);
  std::string alpha = unique_name("alpha", taken_vars);
  ta.variables.push_back(
      {alpha, VarKind::BoundedInt, 1, std::max(n, 1), std::int64_t{1}});
  ta.alpha_var = alpha;
  ta.lockstep_n = n;

  for (auto& a : ta.automata) {
    if (a.role != AutomatonRole::Transformed) continue;
    Expr my_turn = Expr::cmp(CmpOp::Eq, Expr::var(alpha), Expr::int_lit(a.rho));

    std::set<std::string> edge_ids;
    for (const auto& e : a.edges) edge_ids.insert(e.id);

    std::vector<EdgeDef> self_loops;
    for (const auto& loc : a.locations) {
      Expr negs = Expr::bool_lit(true);
      for (const EdgeDef* e : a.outgoing(loc.id))
        negs = land_simplified(negs, Expr::lnot(e->guard));
      EdgeDef self;
      self.id = unique_name("self_" + loc.id, edge_ids);
      edge_ids.insert(self.id);
      self.source = loc.id;
      self.target = loc.id;
      self.guard = land_simplified(negs, my_turn);
      self.action.items.push_back(IncAlphaAction{alpha, n});
      self_loops.push_back(std::move(self));
    }
    for (auto& e : a.edges) {
      e.guard = land_simplified(e.guard, my_turn);
      e.action.items.push_back(IncAlphaAction{alpha, n});
    }
    for (auto& self : self_loops) a.edges.push_back(std::move(self));
  }
}

}  // namespace

TransformResult transform_network(const StatechartNetwork& net,
                                  const TransformOptions& opts) {
  if (opts.stage < 1 || opts.stage > 7)
    throw std::invalid_argument("transformation stage must lie in 1..7");
  for (int k : opts.skip) {
    if (k < 2 || k > 7)
      throw std::invalid_argument("only rules 2..7 can be skipped");
  }

  TransformResult res;
  apply_rule1(net, res.ta, res.map);
  for (int k = 2; k <= opts.stage; ++k) {
    if (opts.skip.count(k) != 0) continue;
    switch (k) {
      case 2: apply_rule2(net, res.ta); break;
      case 3: apply_rule3(net, res.ta); break;
      case 4: apply_rule4(res.ta, res.map); break;
      case 5: apply_rule5(net, res.ta, res.map); break;
      case 6: apply_rule6(net, res.ta); break;
      case 7: apply_rule7(res.ta); break;
    }
  }
  res.ta.stage = opts.stage;
  return res;
}

// ---------------------------------------------------------------------------
// Dump
// ---------------------------------------------------------------------------

std::string dump_ta_network(const TimedAutomatonNetwork& ta) {
  std::ostringstream os;
  os << "ta-network stage " << ta.stage << "\n";
  os << "vars {\n";
  for (const auto& v : ta.variables) {
    switch (v.kind) {
      case VarKind::BoundedInt:
        os << "  int " << v.name << " = " << render_value(v.initial) << " in ["
           << v.lo << ", " << v.hi << "]\n";
        break;
      case VarKind::UnboundedInt:
        os << "  int " << v.name << " = " << render_value(v.initial) << "\n";
        break;
      case VarKind::Bool:
        os << "  bool " << v.name << " = " << render_value(v.initial) << "\n";
        break;
      case VarKind::Event:
        os << "  event " << v.name << "\n";
        break;
      case VarKind::Channel:
        os << "  chan " << v.name << "\n";
        break;
      case VarKind::Clock:
        os << "  clock " << v.name << " = 0\n";
        break;
    }
  }
  os << "}\n";

  for (const auto& a : ta.automata) {
    os << "automaton " << a.name << " ";
    switch (a.role) {
      case AutomatonRole::Transformed: os << "transformed rho " << a.rho; break;
      case AutomatonRole::EventAux: os << "event-aux"; break;
      case AutomatonRole::TimerAux: os << "timer-aux"; break;
    }
    os << " {\n";
    os << "  init " << a.initial << "\n";
    for (const auto& loc : a.locations) {
      os << "  location " << loc.id;
      if (loc.invariant.has_value())
        os << " invariant " << loc.invariant->clock << "<=" << loc.invariant->bound;
      os << "\n";
    }
    for (const auto& e : a.edges) {
      os << "  edge " << e.id << ": (" << e.source << ", ";
      if (expr_equal(e.guard, Expr::bool_lit(true))) os << "NULL";
      else os << render_expr(e.guard, ExprStyle::Compact);
      os << ", ";
      if (e.action.empty()) os << "NULL";
      else os << "<" << render_actions(e.action, ExprStyle::Compact) << ">";
      os << ", ";
      if (e.clock_resets.empty()) {
        os << "NULL";
      } else {
        os << "{";
        for (std::size_t i = 0; i < e.clock_resets.size(); ++i) {
          if (i > 0) os << ", ";
          os << e.clock_resets[i];
        }
        os << "}";
      }
      os << ", " << e.target << ")\n";
    }
    os << "}\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Sync derivation
// ---------------------------------------------------------------------------

EdgeSync edge_sync(const EdgeDef& edge) {
  for (const Expr& c : top_conjuncts(edge.guard)) {
    if (const auto* send = std::get_if<ChanSend>(&c.node().node))
      return {SyncKind::Send, send->channel};
    if (const auto* recv = std::get_if<ChanRecv>(&c.node().node))
      return {SyncKind::Receive, recv->channel};
  }
  return {};
}

Expr guard_without_sync(const EdgeDef& edge) {
  EdgeSync sync = edge_sync(edge);
  if (sync.kind == SyncKind::None) return edge.guard;
  Expr rest = Expr::bool_lit(true);
  bool dropped = false;
  for (const Expr& c : top_conjuncts(edge.guard)) {
    bool is_the_sync = false;
    if (!dropped) {
      if (const auto* send = std::get_if<ChanSend>(&c.node().node))
        is_the_sync = sync.kind == SyncKind::Send && send->channel == sync.channel;
      else if (const auto* recv = std::get_if<ChanRecv>(&c.node().node))
        is_the_sync = sync.kind == SyncKind::Receive && recv->channel == sync.channel;
    }
    if (is_the_sync) {
      dropped = true;
      continue;
    }
    rest = land_simplified(rest, c);
  }
  return rest;
}

std::vector<std::string> unexportable_channel_atoms(const EdgeDef& edge) {
  std::vector<std::string> out;
  EdgeSync sync = edge_sync(edge);
  bool lifted_seen = false;
  std::function<void(const Expr&, bool)> walk = [&](const Expr& e, bool top) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ChanSend>) {
            if (top && !lifted_seen && sync.kind == SyncKind::Send &&
                x.channel == sync.channel) {
              lifted_seen = true;
            } else {
              out.push_back(x.channel + "!");
            }
          } else if constexpr (std::is_same_v<T, ChanRecv>) {
            if (top && !lifted_seen && sync.kind == SyncKind::Receive &&
                x.channel == sync.channel) {
              lifted_seen = true;
            } else {
              out.push_back(x.channel + "?");
            }
          } else if constexpr (std::is_same_v<T, LogicalAnd>) {
            walk(x.lhs, top);
            walk(x.rhs, top);
          } else if constexpr (std::is_same_v<T, LogicalOr>) {
            walk(x.lhs, false);
            walk(x.rhs, false);
          } else if constexpr (std::is_same_v<T, LogicalNot>) {
            walk(x.operand, false);
          } else if constexpr (std::is_same_v<T, Compare> || std::is_same_v<T, Arith>) {
            walk(x.lhs, false);
            walk(x.rhs, false);
          }
        },
        e.node().node);
  };
  walk(edge.guard, true);
  return out;
}

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

std::vector<Diagnostic> check_map_lemmas(const StatechartNetwork& net,
                                         const TimedAutomatonNetwork& ta,
                                         const TransformMap& map) {
  std::vector<Diagnostic> diags;
  auto report = [&](const std::string& code, const std::string& msg) {
    diags.push_back({code, msg, 0, 0});
  };

  // Charts <-> transformed automata, bijectively.
  std::set<std::string> automaton_images;
  for (const auto& chart : net.charts) {
    auto it = map.chart_to_automaton.find(chart.name);
    if (it == map.chart_to_automaton.end()) {
      report("MAP_CHART_MISSING", "chart '" + chart.name + "' has no image");
      continue;
    }
    const TimedAutomatonDef* a = ta.find_automaton(it->second);
    if (a == nullptr || a->role != AutomatonRole::Transformed)
      report("MAP_CHART_BROKEN",
             "chart '" + chart.name + "' maps to a missing or aux automaton");
    if (!automaton_images.insert(it->second).second)
      report("MAP_CHART_NOT_INJECTIVE", "two charts map to '" + it->second + "'");
  }
  for (const auto& a : ta.automata) {
    if (a.role == AutomatonRole::Transformed && automaton_images.count(a.name) == 0)
      report("MAP_CHART_NOT_SURJECTIVE",
             "transformed automaton '" + a.name + "' has no source chart");
  }

  // States <-> locations of transformed automata, bijectively.
  std::set<std::string> location_universe;
  for (const auto& a : ta.automata) {
    if (a.role != AutomatonRole::Transformed) continue;
    for (const auto& l : a.locations) location_universe.insert(a.name + "." + l.id);
  }
  std::set<std::string> location_images;
  for (const auto& chart : net.charts) {
    for (const auto& s : chart.states) {
      auto it = map.state_to_location.find(chart.name + "." + s.id);
      if (it == map.state_to_location.end()) {
        report("MAP_STATE_MISSING",
               "state '" + chart.name + "." + s.id + "' has no image");
        continue;
      }
      if (location_universe.count(it->second) == 0)
        report("MAP_STATE_BROKEN", "state image '" + it->second + "' does not exist");
      if (!location_images.insert(it->second).second)
        report("MAP_STATE_NOT_INJECTIVE", "two states map to '" + it->second + "'");
    }
  }
  for (const auto& loc : location_universe) {
    if (location_images.count(loc) == 0)
      report("MAP_STATE_NOT_SURJECTIVE", "location '" + loc + "' has no source state");
  }

  // Transitions -> edges, injectively; self-loops make it non-surjective
  // from stage 7 on.
  std::set<std::string> edge_universe;
  for (const auto& a : ta.automata) {
    if (a.role != AutomatonRole::Transformed) continue;
    for (const auto& e : a.edges) edge_universe.insert(a.name + "." + e.id);
  }
  std::set<std::string> edge_images;
  for (const auto& chart : net.charts) {
    for (const auto& t : chart.transitions) {
      auto it = map.transition_to_edge.find(chart.name + "." + t.id);
      if (it == map.transition_to_edge.end()) {
        report("MAP_TRANSITION_MISSING",
               "transition '" + chart.name + "." + t.id + "' has no image");
        continue;
      }
      if (edge_universe.count(it->second) == 0)
        report("MAP_TRANSITION_BROKEN",
               "transition image '" + it->second + "' does not exist");
      if (!edge_images.insert(it->second).second)
        report("MAP_TRANSITION_NOT_INJECTIVE", "two transitions map to '" + it->second + "'");
    }
  }
  if (ta.stage >= 7 && !net.charts.empty()) {
    bool has_states = false;
    for (const auto& chart : net.charts) has_states |= !chart.states.empty();
    if (has_states && edge_images.size() >= edge_universe.size())
      report("MAP_TRANSITION_SURJECTIVE",
             "the transition map must not cover the lockstep self-loops");
  }

  // Variables: sources keep their names; everything unmapped is a channel,
  // a clock, or the lockstep index.
  for (const auto& v : net.variables) {
    if (!is_valued(v.kind)) continue;
    auto it = map.variable_map.find(v.name);
    if (it == map.variable_map.end()) {
      report("MAP_VARIABLE_MISSING", "variable '" + v.name + "' has no image");
      continue;
    }
    const VarDecl* target = find_var(ta.variables, it->second);
    if (target == nullptr || !is_valued(target->kind))
      report("MAP_VARIABLE_BROKEN", "variable image '" + it->second + "' is not valued");
  }
  std::set<std::string> var_images;
  for (const auto& [from, to] : map.variable_map) var_images.insert(to);
  for (const auto& v : ta.variables) {
    if (var_images.count(v.name) != 0) continue;
    bool fresh = v.kind == VarKind::Channel || v.kind == VarKind::Clock ||
                 v.kind == VarKind::Event || v.name == ta.alpha_var;
    if (!fresh)
      report("MAP_VARIABLE_UNACCOUNTED",
             "TA variable '" + v.name + "' is neither mapped nor introduced");
  }

  return diags;
}

namespace {

/// Enumerates every valuation of the given bounded declarations crossed with
/// every subset of the given channels, invoking fn(valuation, offers).
/// Returns false (without invoking) when the product exceeds the cap.
bool enumerate_contexts(
    const std::vector<const VarDecl*>& decls, const std::vector<std::string>& channels,
    const std::function<void(const Valuation&, const std::set<std::string>&)>& fn) {
  constexpr std::uint64_t kCap = 1u << 20;
  std::uint64_t combos = 1;
  for (const VarDecl* d : decls) {
    std::uint64_t size = d->kind == VarKind::Bool
                             ? 2
                             : static_cast<std::uint64_t>(d->hi - d->lo + 1);
    if (combos > kCap / std::max<std::uint64_t>(size, 1)) return false;
    combos *= size;
  }
  if (channels.size() > 20 || combos > (kCap >> channels.size())) return false;

  std::vector<std::int64_t> idx(decls.size(), 0);
  for (;;) {
    Valuation v;
    for (std::size_t i = 0; i < decls.size(); ++i) {
      if (decls[i]->kind == VarKind::Bool)
        v.values[decls[i]->name] = idx[i] != 0;
      else
        v.values[decls[i]->name] = decls[i]->lo + idx[i];
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << channels.size()); ++mask) {
      std::set<std::string> offers;
      for (std::size_t b = 0; b < channels.size(); ++b) {
        if (mask & (std::uint64_t{1} << b)) offers.insert(channels[b]);
      }
      fn(v, offers);
    }
    std::size_t k = 0;
    for (; k < decls.size(); ++k) {
      std::int64_t size = decls[k]->kind == VarKind::Bool ? 2 : decls[k]->hi - decls[k]->lo + 1;
      if (++idx[k] < size) break;
      idx[k] = 0;
    }
    if (k == decls.size()) break;
  }
  return true;
}

/// Gathers the bounded declarations and channels referenced by the guards;
/// returns false when some referenced variable is unbounded or undeclared.
bool collect_guard_context(const TimedAutomatonNetwork& ta,
                           const std::vector<const EdgeDef*>& edges,
                           std::vector<const VarDecl*>& decls,
                           std::vector<std::string>& channels) {
  std::set<std::string> names, chans;
  for (const EdgeDef* e : edges) {
    auto n = referenced_names(e->guard);
    names.insert(n.begin(), n.end());
    auto c = referenced_channels(e->guard);
    chans.insert(c.begin(), c.end());
  }
  for (const auto& name : names) {
    const VarDecl* d = find_var(ta.variables, name);
    if (d == nullptr) return false;
    if (d->kind == VarKind::Bool || d->kind == VarKind::BoundedInt) {
      decls.push_back(d);
    } else {
      return false;  // unbounded or clock-valued: cannot enumerate
    }
  }
  channels.assign(chans.begin(), chans.end());
  return true;
}

}  // namespace

std::vector<Diagnostic> check_guard_exclusivity(const TimedAutomatonNetwork& ta) {
  std::vector<Diagnostic> diags;
  for (const auto& a : ta.automata) {
    if (a.role != AutomatonRole::Transformed) continue;
    for (const auto& loc : a.locations) {
      auto outs = a.outgoing(loc.id);
      if (outs.size() < 2) continue;
      std::vector<const VarDecl*> decls;
      std::vector<std::string> channels;
      if (!collect_guard_context(ta, outs, decls, channels)) {
        diags.push_back({"CHECK_SKIPPED",
                         a.name + "." + loc.id + ": guards reference variables that "
                         "cannot be enumerated", 0, 0});
        continue;
      }
      bool overlap = false;
      bool ran = enumerate_contexts(
          decls, channels, [&](const Valuation& v, const std::set<std::string>& offers) {
            if (overlap) return;
            int enabled = 0;
            GuardContext ctx = GuardContext::timed(offers);
            for (const EdgeDef* e : outs) {
              if (eval_bool(e->guard, v, ctx)) ++enabled;
            }
            if (enabled > 1) overlap = true;
          });
      if (!ran)
        diags.push_back({"CHECK_SKIPPED",
                         a.name + "." + loc.id + ": context space too large", 0, 0});
      else if (overlap)
        diags.push_back({"RULE6_OVERLAP",
                         a.name + "." + loc.id + ": two outgoing guards hold at once",
                         0, 0});
    }
  }
  return diags;
}

std::vector<Diagnostic> check_lockstep_totality(const TimedAutomatonNetwork& ta) {
  std::vector<Diagnostic> diags;
  if (ta.alpha_var.empty()) {
    diags.push_back({"RULE7_MISSING", "the network has no lockstep index", 0, 0});
    return diags;
  }
  for (const auto& a : ta.automata) {
    if (a.role != AutomatonRole::Transformed) continue;
    for (const auto& loc : a.locations) {
      auto outs = a.outgoing(loc.id);
      std::vector<const VarDecl*> decls;
      std::vector<std::string> channels;
      if (!collect_guard_context(ta, outs, decls, channels)) {
        diags.push_back({"CHECK_SKIPPED",
                         a.name + "." + loc.id + ": guards reference variables that "
                         "cannot be enumerated", 0, 0});
        continue;
      }
      bool gap = false, overlap = false;
      bool ran = enumerate_contexts(
          decls, channels, [&](const Valuation& v, const std::set<std::string>& offers) {
            auto alpha_it = v.values.find(ta.alpha_var);
            // Guards all carry an alpha conjunct, so alpha is always here.
            bool my_turn =
                alpha_it != v.values.end() &&
                std::get<std::int64_t>(alpha_it->second) == a.rho;
            int enabled = 0;
            GuardContext ctx = GuardContext::timed(offers);
            for (const EdgeDef* e : outs) {
              if (eval_bool(e->guard, v, ctx)) ++enabled;
            }
            if (my_turn && enabled != 1) (enabled == 0 ? gap : overlap) = true;
            if (!my_turn && enabled != 0) overlap = true;
          });
      if (!ran)
        diags.push_back({"CHECK_SKIPPED",
                         a.name + "." + loc.id + ": context space too large", 0, 0});
      if (gap)
        diags.push_back({"RULE7_GAP",
                         a.name + "." + loc.id + ": no edge enabled on this automaton's turn",
                         0, 0});
      if (overlap)
        diags.push_back({"RULE7_OVERLAP",
                         a.name + "." + loc.id + ": enabled edges off-turn or doubled",
                         0, 0});
    }
  }
  return diags;
}

}  // namespace scforge
