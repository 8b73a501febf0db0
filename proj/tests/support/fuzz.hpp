#pragma once

// Seeded generator of small random statechart networks for differential
// testing. It emits DSL text (so the parser is part of the loop), then
// parses and validates it; any diagnostic is a generator bug and throws.
// The same seed yields the same network everywhere: raw mt19937_64 draws
// reduced with %, no distribution objects.

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scforge/parser.hpp"

namespace scforge::fuzz {

struct Limits {
  int max_charts = 3;
  int max_states = 5;       // per chart, counting the initial state
  int max_events = 2;
  int max_triggers = 1;     // timing-trigger occurrences, network-wide
  std::int64_t max_hi = 7;  // int domains stay within [0, max_hi]
};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : gen_(seed) {}
  // uniform in [0, n); n <= 1 collapses to 0
  int pick(int n) {
    return n <= 1 ? 0 : static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
  }
  bool chance(int num, int den) { return pick(den) < num; }

 private:
  std::mt19937_64 gen_;
};

namespace detail {

struct IntVar {
  std::string name;
  std::int64_t hi;
};

class Builder {
 public:
  Builder(std::uint64_t seed, const Limits& lim) : g_(seed), lim_(lim) {}

  std::string build() {
    declare_vars();
    const int charts = 1 + g_.pick(lim_.max_charts);
    for (int c = 0; c < charts; ++c) emit_chart(c);
    return out_.str();
  }

 private:
  void declare_vars() {
    out_ << "var {\n";
    const int nv = 1 + g_.pick(3);
    for (int i = 0; i < nv; ++i) {
      const std::int64_t hi = 2 + g_.pick(static_cast<int>(lim_.max_hi) - 1);
      const std::int64_t init = g_.pick(static_cast<int>(hi) + 1);
      IntVar v{"x" + std::to_string(i), hi};
      out_ << "  int " << v.name << " = " << init << " in [0, " << hi << "];\n";
      ints_.push_back(v);
    }
    if (g_.chance(1, 3)) {
      has_bool_ = true;
      out_ << "  bool b0 = " << (g_.chance(1, 2) ? "true" : "false") << ";\n";
    }
    const int nev = g_.pick(lim_.max_events + 1);
    for (int i = 0; i < nev; ++i) {
      events_.push_back("eventE" + std::to_string(i));
      out_ << "  event " << events_.back() << ";\n";
    }
    out_ << "}\n";
    triggers_left_ = g_.chance(1, 2) ? lim_.max_triggers : 0;
  }

  std::string int_atom() {
    static const char* ops[] = {"==", "!=", "<", "<=", ">", ">="};
    const IntVar& v = ints_[g_.pick(static_cast<int>(ints_.size()))];
    return v.name + " " + ops[g_.pick(6)] + " " +
           std::to_string(g_.pick(static_cast<int>(v.hi) + 1));
  }

  std::string atom() {
    const int r = g_.pick(10);
    if (r < 5) return int_atom();
    if (r < 7 && !events_.empty())
      return events_[g_.pick(static_cast<int>(events_.size()))];
    if (r < 8 && has_bool_) return "b0";
    if (r < 9) return "!(" + int_atom() + ")";
    return "true";
  }

  std::string plain_guard() {
    const int n = 1 + g_.pick(2);
    std::string s = atom();
    for (int i = 1; i < n; ++i)
      s += (g_.chance(1, 2) ? " && " : " || ") + atom();
    return s;
  }

  // One in-domain assignment. Copies only ever narrow or keep the domain,
  // so no value can leave its range.
  std::string assignment() {
    if (has_bool_ && g_.chance(1, 4)) {
      const int r = g_.pick(3);
      if (r == 0) return "b0 := true";
      if (r == 1) return "b0 := false";
      return "b0 := " + int_atom();
    }
    const IntVar& v = ints_[g_.pick(static_cast<int>(ints_.size()))];
    if (g_.chance(1, 3)) {
      std::vector<const IntVar*> narrower;
      for (const IntVar& w : ints_)
        if (w.hi <= v.hi && w.name != v.name) narrower.push_back(&w);
      if (!narrower.empty()) {
        const IntVar* w = narrower[g_.pick(static_cast<int>(narrower.size()))];
        return v.name + " := " + w->name;
      }
    }
    return v.name + " := " + std::to_string(g_.pick(static_cast<int>(v.hi) + 1));
  }

  std::string action_block() {
    const int n = 1 + g_.pick(2);
    std::string s = "{ ";
    for (int i = 0; i < n; ++i) s += assignment() + "; ";
    return s + "}";
  }

  void emit_chart(int c) {
    const std::string tag = std::to_string(c);
    out_ << "\nstatechart Y" << (c + 1) << " priority " << (c + 1) << " {\n";
    const int ns = 2 + g_.pick(lim_.max_states - 1);
    std::vector<bool> has_exit(ns, false);
    auto state_name = [&](int k) { return "s" + tag + "_" + std::to_string(k); };
    for (int k = 0; k < ns; ++k) {
      out_ << "  state " << state_name(k);
      if (k > 0 && g_.chance(1, 3)) out_ << " entry " << action_block();
      if (k > 0 && g_.chance(1, 4)) {
        out_ << " exit " << action_block();
        has_exit[k] = true;
      }
      out_ << ";\n";
    }
    out_ << "  initial " << state_name(0) << ";\n";
    out_ << "  transition t" << ++transition_counter_ << ": " << state_name(0)
         << " -> " << state_name(1 + g_.pick(ns - 1)) << " when true;\n";
    for (int k = 1; k < ns; ++k) {
      const int nt = g_.pick(3);
      for (int p = 1; p <= nt; ++p) {
        std::string guard, action;
        if (triggers_left_ > 0 && g_.chance(1, 6)) {
          --triggers_left_;
          guard = (g_.chance(1, 2) ? "after " : "every ") +
                  std::to_string(1 + g_.pick(4)) + "s";
          if (g_.chance(1, 2)) guard += " && " + atom();
        } else if (!has_exit[k] && g_.chance(1, 4)) {
          // guarded increment: the conjunct keeps the value in range, and
          // no exit action can bump it between guard check and assignment
          const IntVar& v = ints_[g_.pick(static_cast<int>(ints_.size()))];
          guard = v.name + " < " + std::to_string(v.hi);
          if (g_.chance(1, 2)) guard += " && " + atom();
          action = "{ " + v.name + " := " + v.name + " + 1; }";
        } else {
          guard = plain_guard();
        }
        if (action.empty() && g_.chance(1, 2)) action = action_block();
        out_ << "  transition t" << ++transition_counter_ << ": "
             << state_name(k) << " -> " << state_name(g_.pick(ns))
             << " priority " << p << " when " << guard;
        if (!action.empty()) out_ << " do " << action;
        out_ << ";\n";
      }
    }
    out_ << "}\n";
  }

  Gen g_;
  Limits lim_;
  std::ostringstream out_;
  std::vector<IntVar> ints_;
  std::vector<std::string> events_;
  bool has_bool_ = false;
  int triggers_left_ = 0;
  int transition_counter_ = 0;
};

}  // namespace detail

inline std::string random_network_text(std::uint64_t seed,
                                       const Limits& lim = {}) {
  return detail::Builder(seed, lim).build();
}

/// Generates, parses and validates a network. Diagnostics mean the generator
/// itself is broken, so they throw rather than return.
inline StatechartNetwork random_network(std::uint64_t seed,
                                        const Limits& lim = {}) {
  const std::string text = random_network_text(seed, lim);
  ParseResult pr = parse_network(text);
  if (!pr.ok())
    throw std::logic_error("fuzz seed " + std::to_string(seed) +
                           " produced an unparsable network:\n" + text + "\n" +
                           format_diagnostics(pr.diagnostics));
  std::vector<Diagnostic> diags = validate(*pr.network);
  if (!diags.empty())
    throw std::logic_error("fuzz seed " + std::to_string(seed) +
                           " produced an invalid network:\n" + text + "\n" +
                           format_diagnostics(diags));
  return std::move(*pr.network);
}

}  // namespace scforge::fuzz
