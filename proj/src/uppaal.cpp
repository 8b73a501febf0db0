#include "scforge/uppaal.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace scforge {

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string without_spaces(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

template <typename K, typename V>
std::map<V, K> invert(const std::map<K, V>& in) {
  std::map<V, K> out;
  for (const auto& [k, v] : in) out.emplace(v, k);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

namespace {

std::string declaration_block(const TimedAutomatonNetwork& ta) {
  std::ostringstream os;
  for (const auto& v : ta.variables) {
    switch (v.kind) {
      case VarKind::BoundedInt:
        os << "int[" << v.lo << "," << v.hi << "] " << v.name << " = "
           << render_value(v.initial) << ";\n";
        break;
      case VarKind::UnboundedInt:
        os << "int " << v.name << " = " << render_value(v.initial) << ";\n";
        break;
      case VarKind::Bool:
        os << "bool " << v.name << " = " << render_value(v.initial) << ";\n";
        break;
      case VarKind::Event:
        // Statechart events have no UPPAAL form; the channel rule turns them
        // into chan declarations before export, so this lane is for partial
        // pipelines only.
        os << "chan " << v.name << ";\n";
        break;
      case VarKind::Channel:
        os << "chan " << v.name << ";\n";
        break;
      case VarKind::Clock:
        os << "clock " << v.name << ";\n";
        break;
    }
  }
  if (!ta.alpha_var.empty() && ta.lockstep_n >= 1) {
    os << "void Inc() { " << ta.alpha_var << " = " << ta.alpha_var << " % "
       << ta.lockstep_n << " + 1; }\n";
  }
  return os.str();
}

std::string template_note(const TimedAutomatonDef& a, const TransformMap& map) {
  auto charts = invert(map.chart_to_automaton);
  if (auto it = charts.find(a.name); it != charts.end())
    return "// image of statechart " + it->second;
  auto events = invert(map.event_channel);
  auto chans = invert(map.occurrence_channel);
  for (const auto& e : a.edges) {
    EdgeSync sync = edge_sync(e);
    if (sync.kind != SyncKind::Send) continue;
    if (auto it = events.find(sync.channel); it != events.end())
      return "// broadcaster for event " + it->second;
    if (auto it = chans.find(sync.channel); it != chans.end()) {
      auto clock = map.occurrence_clock.find(it->second);
      std::string note = "// timer for trigger occurrence " + std::to_string(it->second);
      if (clock != map.occurrence_clock.end()) note += " (clock " + clock->second + ")";
      return note;
    }
  }
  return {};
}

std::string assignment_label(const EdgeDef& e) {
  std::string out = render_actions(e.action, ExprStyle::Spaced);
  for (const auto& c : e.clock_resets) {
    if (!out.empty()) out += ", ";
    out += c + " = 0";
  }
  return out;
}

}  // namespace

std::string write_uppaal_xml(const TimedAutomatonNetwork& ta,
                             const TransformMap& map, ExportReport* report) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  os << "<!DOCTYPE nta PUBLIC '-//Uppaal Team//DTD Flat System 1.1//EN' "
        "'http://www.it.uu.se/research/group/darts/uppaal/flat-1_1.dtd'>\n";
  os << "<nta>\n";
  os << "  <declaration>" << xml_escape(declaration_block(ta)) << "</declaration>\n";

  int next_id = 0;
  for (const auto& a : ta.automata) {
    os << "  <template>\n";
    os << "    <name>" << xml_escape(a.name) << "</name>\n";
    if (std::string note = template_note(a, map); !note.empty())
      os << "    <declaration>" << xml_escape(note) << "</declaration>\n";

    std::map<std::string, std::string> loc_id;
    for (const auto& loc : a.locations) {
      std::string id = "id" + std::to_string(next_id++);
      loc_id[loc.id] = id;
      os << "    <location id=\"" << id << "\">\n";
      os << "      <name>" << xml_escape(loc.id) << "</name>\n";
      if (loc.invariant.has_value()) {
        os << "      <label kind=\"invariant\">"
           << xml_escape(loc.invariant->clock + " <= " +
                         std::to_string(loc.invariant->bound))
           << "</label>\n";
      }
      os << "    </location>\n";
    }
    os << "    <init ref=\"" << loc_id.at(a.initial) << "\"/>\n";

    for (const auto& e : a.edges) {
      os << "    <transition id=\"" << xml_escape(e.id) << "\">\n";
      os << "      <source ref=\"" << loc_id.at(e.source) << "\"/>\n";
      os << "      <target ref=\"" << loc_id.at(e.target) << "\"/>\n";

      auto leftovers = unexportable_channel_atoms(e);
      if (!leftovers.empty()) {
        os << "      <!-- WARN: channel atoms with no synchronisation "
              "encoding stay in the guard text -->\n";
        if (report != nullptr) {
          std::string names;
          for (const auto& c : leftovers) {
            if (!names.empty()) names += ", ";
            names += c;
          }
          report->warnings.push_back(
              {"UNSUPPORTED_CONSTRUCT",
               a.name + "." + e.id + ": channel atom(s) " + names +
                   " cannot become a synchronisation label; emitted verbatim",
               0, 0});
        }
      }

      EdgeSync sync = edge_sync(e);
      Expr guard = guard_without_sync(e);
      if (!expr_equal(guard, Expr::bool_lit(true))) {
        os << "      <label kind=\"guard\">"
           << xml_escape(render_expr(guard, ExprStyle::Spaced)) << "</label>\n";
      }
      if (sync.kind != SyncKind::None) {
        os << "      <label kind=\"synchronisation\">"
           << xml_escape(sync.channel + (sync.kind == SyncKind::Send ? "!" : "?"))
           << "</label>\n";
      }
      if (std::string assign = assignment_label(e); !assign.empty()) {
        os << "      <label kind=\"assignment\">" << xml_escape(assign)
           << "</label>\n";
      }
      os << "    </transition>\n";
    }
    os << "  </template>\n";
  }

  os << "  <system>system";
  for (std::size_t i = 0; i < ta.automata.size(); ++i)
    os << (i == 0 ? " " : ", ") << ta.automata[i].name;
  os << ";\n</system>\n";
  os << "</nta>\n";
  return os.str();
}

std::string write_queries(const std::vector<SafetyProperty>& props) {
  return properties_to_text(props);
}

// ---------------------------------------------------------------------------
// Reader: a scanner for the exporter's XML subset
// ---------------------------------------------------------------------------

namespace {

struct XmlTag {
  std::string name;
  std::map<std::string, std::string> attrs;
  bool closing = false;
  bool self_closing = false;
};

class XmlScanner {
 public:
  XmlScanner(const std::string& text, std::vector<Diagnostic>& diags)
      : text_(text), diags_(diags) {}

  bool failed() const { return failed_; }

  /// Next markup item, skipping prologue/comments. nullopt at end of input.
  std::optional<XmlTag> next_tag() {
    skip_misc();
    if (failed_ || at_ >= text_.size()) return std::nullopt;
    if (text_[at_] != '<') return error("text where markup was expected");
    ++at_;
    XmlTag tag;
    if (peek() == '/') {
      tag.closing = true;
      ++at_;
    }
    tag.name = read_name();
    if (tag.name.empty()) return error("empty tag name");
    for (;;) {
      skip_space();
      if (at_ >= text_.size()) return error("truncated tag");
      if (text_[at_] == '>') {
        ++at_;
        return tag;
      }
      if (text_[at_] == '/' && at_ + 1 < text_.size() && text_[at_ + 1] == '>') {
        tag.self_closing = true;
        at_ += 2;
        return tag;
      }
      std::string attr = read_name();
      if (attr.empty()) return error("expected an attribute name");
      skip_space();
      if (peek() != '=') return error("expected '=' after attribute name");
      ++at_;
      skip_space();
      char quote = peek();
      if (quote != '"' && quote != '\'') return error("unquoted attribute value");
      ++at_;
      std::size_t close = text_.find(quote, at_);
      if (close == std::string::npos) return error("unterminated attribute value");
      tag.attrs[attr] = unescape(text_.substr(at_, close - at_));
      at_ = close + 1;
    }
  }

  /// Character data up to the next markup item.
  std::string text_until_tag() {
    std::string raw;
    while (at_ < text_.size()) {
      if (text_[at_] == '<') {
        if (text_.compare(at_, 4, "<!--") == 0) {
          skip_comment();
          continue;
        }
        break;
      }
      raw += text_[at_++];
    }
    return unescape(raw);
  }

  /// Consumes everything through the matching close of `name` (the open tag
  /// has already been read). Handles nested same-name elements.
  void skip_element(const std::string& name) {
    int depth = 1;
    while (depth > 0) {
      text_until_tag();
      auto tag = next_tag();
      if (!tag.has_value()) {
        error("unclosed <" + name + ">");
        return;
      }
      if (tag->name == name) {
        if (tag->closing) --depth;
        else if (!tag->self_closing) ++depth;
      }
    }
  }

  int line() const {
    auto upto = text_.begin() + static_cast<std::ptrdiff_t>(std::min(at_, text_.size()));
    return 1 + static_cast<int>(std::count(text_.begin(), upto, '\n'));
  }

 private:
  char peek() const { return at_ < text_.size() ? text_[at_] : '\0'; }

  void skip_space() {
    while (at_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[at_])))
      ++at_;
  }

  void skip_comment() {
    std::size_t end = text_.find("-->", at_ + 4);
    if (end == std::string::npos) {
      error("unterminated comment");
      at_ = text_.size();
      return;
    }
    at_ = end + 3;
  }

  void skip_misc() {
    for (;;) {
      skip_space();
      if (text_.compare(at_, 4, "<!--") == 0) {
        skip_comment();
      } else if (text_.compare(at_, 2, "<?") == 0) {
        std::size_t end = text_.find("?>", at_);
        if (end == std::string::npos) {
          error("unterminated processing instruction");
          at_ = text_.size();
          return;
        }
        at_ = end + 2;
      } else if (text_.compare(at_, 2, "<!") == 0) {
        std::size_t end = text_.find('>', at_);
        if (end == std::string::npos) {
          error("unterminated declaration");
          at_ = text_.size();
          return;
        }
        at_ = end + 1;
      } else {
        return;
      }
    }
  }

  std::string read_name() {
    std::string name;
    while (at_ < text_.size()) {
      char c = text_[at_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          c == ':' || c == '.') {
        name += c;
        ++at_;
      } else {
        break;
      }
    }
    return name;
  }

  std::string unescape(const std::string& raw) {
    std::string out;
    for (std::size_t i = 0; i < raw.size();) {
      if (raw[i] != '&') {
        out += raw[i++];
        continue;
      }
      std::size_t semi = raw.find(';', i);
      std::string entity =
          semi == std::string::npos ? "" : raw.substr(i + 1, semi - i - 1);
      if (entity == "amp") out += '&';
      else if (entity == "lt") out += '<';
      else if (entity == "gt") out += '>';
      else if (entity == "quot") out += '"';
      else if (entity == "apos") out += '\'';
      else {
        error("unknown entity '&" + entity + ";'");
        return out;
      }
      i = semi + 1;
    }
    return out;
  }

  std::nullopt_t error(const std::string& msg) {
    if (!failed_) diags_.push_back({"XML_MALFORMED", msg, line(), 0});
    failed_ = true;
    at_ = text_.size();
    return std::nullopt;
  }

  const std::string& text_;
  std::vector<Diagnostic>& diags_;
  std::size_t at_ = 0;
  bool failed_ = false;
};

// ---------------------------------------------------------------------------
// Reader: declaration and label texts
// ---------------------------------------------------------------------------

std::string strip_line_comments(const std::string& text) {
  std::string out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (auto c = line.find("//"); c != std::string::npos) line = line.substr(0, c);
    out += line;
    out += '\n';
  }
  return out;
}

/// Splits on `sep` at zero paren/bracket/brace depth.
std::vector<std::string> split_top_level(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

struct DeclScanner {
  std::string text;
  std::size_t at = 0;

  void skip_space() {
    while (at < text.size() && std::isspace(static_cast<unsigned char>(text[at])))
      ++at;
  }

  std::string word() {
    skip_space();
    std::string out;
    while (at < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[at])) || text[at] == '_'))
      out += text[at++];
    return out;
  }

  bool literal(char c) {
    skip_space();
    if (at < text.size() && text[at] == c) {
      ++at;
      return true;
    }
    return false;
  }

  std::optional<std::int64_t> integer() {
    skip_space();
    std::size_t start = at;
    if (at < text.size() && (text[at] == '-' || text[at] == '+')) ++at;
    while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) ++at;
    if (at == start || (at == start + 1 && !std::isdigit(static_cast<unsigned char>(
                                               text[start])))) {
      return std::nullopt;
    }
    return std::stoll(text.substr(start, at - start));
  }

  bool done() {
    skip_space();
    return at >= text.size();
  }
};

bool parse_declarations(const std::string& body, std::vector<VarDecl>& vars,
                        std::vector<Diagnostic>& diags) {
  bool ok = true;
  for (const std::string& raw : split_top_level(strip_line_comments(body), ';')) {
    std::string chunk = trim(raw);
    if (chunk.empty()) continue;
    // Function definitions (the callable lockstep update) carry no state;
    // the inline assignment form is what edges use.
    if (chunk.rfind("void", 0) == 0) continue;

    auto fail = [&](const std::string& msg) {
      diags.push_back({"DECL_SYNTAX", "declaration '" + chunk + "': " + msg, 0, 0});
      ok = false;
    };

    DeclScanner sc{chunk};
    std::string kw = sc.word();
    if (kw == "broadcast") kw = sc.word();  // accepted alias: broadcast chan
    if (kw == "chan") {
      std::string name = sc.word();
      if (name.empty() || !sc.done()) fail("expected `chan NAME`");
      else vars.push_back({name, VarKind::Channel, 0, 0, std::int64_t{0}});
    } else if (kw == "clock") {
      std::string name = sc.word();
      if (name.empty() || !sc.done()) fail("expected `clock NAME`");
      else vars.push_back({name, VarKind::Clock, 0, 0, std::int64_t{0}});
    } else if (kw == "bool") {
      std::string name = sc.word();
      Value init = false;
      if (sc.literal('=')) {
        std::string v = sc.word();
        if (v != "true" && v != "false") {
          fail("expected true or false");
          continue;
        }
        init = v == "true";
      }
      if (name.empty() || !sc.done()) fail("expected `bool NAME = VALUE`");
      else vars.push_back({name, VarKind::Bool, 0, 0, init});
    } else if (kw == "int") {
      bool bounded = sc.literal('[');
      std::int64_t lo = 0, hi = 0;
      if (bounded) {
        auto l = sc.integer();
        bool comma = sc.literal(',');
        auto h = sc.integer();
        if (!l || !comma || !h || !sc.literal(']')) {
          fail("expected `int[LO,HI]`");
          continue;
        }
        lo = *l;
        hi = *h;
      }
      std::string name = sc.word();
      std::int64_t init = 0;
      if (sc.literal('=')) {
        auto v = sc.integer();
        if (!v) {
          fail("expected an integer initializer");
          continue;
        }
        init = *v;
      }
      if (name.empty() || !sc.done()) {
        fail("expected `int NAME = VALUE`");
      } else {
        vars.push_back({name, bounded ? VarKind::BoundedInt : VarKind::UnboundedInt,
                        lo, hi, init});
      }
    } else {
      fail("unknown declaration keyword '" + kw + "'");
    }
  }
  return ok;
}

std::optional<ClockConstraint> parse_invariant(const std::string& text,
                                               std::vector<Diagnostic>& diags) {
  std::size_t op = text.find("<=");
  if (op != std::string::npos) {
    std::string clock = trim(text.substr(0, op));
    DeclScanner sc{text.substr(op + 2)};
    auto bound = sc.integer();
    if (!clock.empty() && bound.has_value() && sc.done())
      return ClockConstraint{clock, *bound};
  }
  diags.push_back({"LABEL_SYNTAX",
                   "invariant '" + text + "' is not of the shape `clock <= bound`", 0,
                   0});
  return std::nullopt;
}

bool parse_assignments(const std::string& text, const std::vector<VarDecl>& decls,
                       EdgeDef& edge, std::vector<Diagnostic>& diags) {
  for (const std::string& raw : split_top_level(text, ',')) {
    std::string item = trim(raw);
    if (item.empty()) continue;
    auto fail = [&](const std::string& msg) {
      diags.push_back({"LABEL_SYNTAX", "assignment '" + item + "': " + msg, 0, 0});
      return false;
    };
    std::size_t eq = item.find('=');
    if (eq == std::string::npos) return fail("expected `name = expr`");
    std::string lhs = trim(item.substr(0, eq));
    std::string rhs = trim(item.substr(eq + 1));
    if (lhs.empty() || rhs.empty()) return fail("expected `name = expr`");

    // The lockstep bump is the one modulo expression in the language.
    std::string squeezed = without_spaces(rhs);
    std::string inc_prefix = lhs + "%";
    if (squeezed.rfind(inc_prefix, 0) == 0) {
      std::string tail = squeezed.substr(inc_prefix.size());
      std::size_t plus = tail.find("+1");
      if (plus == std::string::npos || plus + 2 != tail.size())
        return fail("modulo is only valid as `x = x % n + 1`");
      DeclScanner sc{tail.substr(0, plus)};
      auto n = sc.integer();
      if (!n.has_value() || !sc.done() || *n < 1)
        return fail("modulo is only valid as `x = x % n + 1`");
      edge.action.items.push_back(IncAlphaAction{lhs, static_cast<int>(*n)});
      continue;
    }

    const VarDecl* decl = find_var(decls, lhs);
    if (decl != nullptr && decl->kind == VarKind::Clock) {
      if (without_spaces(rhs) != "0") return fail("clocks can only reset to 0");
      edge.clock_resets.push_back(lhs);
      continue;
    }

    std::vector<Diagnostic> expr_diags;
    auto value = parse_ta_guard_text(rhs, decls, expr_diags);
    if (!value.has_value()) {
      for (auto& d : expr_diags) diags.push_back(d);
      return false;
    }
    edge.action.items.push_back(AssignAction{lhs, *value});
  }
  return true;
}

/// Guards are re-assembled conjunct by conjunct with the sync atom leftmost,
/// the exact shape the transformation rules build (channel atom first, later
/// rules appending on the right), so a round trip is structurally identical.
Expr rebuild_guard(const std::optional<Expr>& sync_atom,
                   const std::optional<Expr>& parsed) {
  std::vector<Expr> conjuncts;
  if (sync_atom.has_value()) conjuncts.push_back(*sync_atom);
  if (parsed.has_value()) {
    for (const Expr& c : top_conjuncts(*parsed)) conjuncts.push_back(c);
  }
  if (conjuncts.empty()) return Expr::bool_lit(true);
  Expr out = conjuncts[0];
  for (std::size_t i = 1; i < conjuncts.size(); ++i) out = Expr::land(out, conjuncts[i]);
  return out;
}

struct TemplateReader {
  XmlScanner& sc;
  std::vector<Diagnostic>& diags;
  const std::vector<VarDecl>& decls;

  std::map<std::string, std::string> id_to_name;  // XML id attr -> location id
  std::string init_ref;
  int anon_edges = 0;

  bool read_into(TimedAutomatonDef& a) {
    for (;;) {
      sc.text_until_tag();
      auto tag = sc.next_tag();
      if (!tag.has_value()) return false;
      if (tag->closing && tag->name == "template") break;
      if (tag->closing) {
        diags.push_back({"XML_MALFORMED", "stray </" + tag->name + ">", sc.line(), 0});
        return false;
      }
      if (tag->name == "name") {
        a.name = trim(sc.text_until_tag());
        if (!close_tag("name")) return false;
      } else if (tag->name == "location") {
        if (!read_location(*tag, a)) return false;
      } else if (tag->name == "init") {
        init_ref = tag->attrs.count("ref") ? tag->attrs.at("ref") : "";
        if (!tag->self_closing && !close_tag("init")) return false;
      } else if (tag->name == "transition") {
        if (!read_transition(*tag, a)) return false;
      } else if (!tag->self_closing) {
        sc.skip_element(tag->name);  // local declarations, parameters, ...
      }
    }
    if (a.name.empty()) {
      diags.push_back({"XML_MALFORMED", "template without a name", sc.line(), 0});
      return false;
    }
    auto resolve = [&](const std::string& ref, std::string& out,
                       const std::string& what) {
      auto it = id_to_name.find(ref);
      if (it == id_to_name.end()) {
        diags.push_back({"REF_UNKNOWN", a.name + ": " + what + " ref '" + ref +
                                            "' names no location",
                         0, 0});
        return false;
      }
      out = it->second;
      return true;
    };
    if (!resolve(init_ref, a.initial, "init")) return false;
    for (auto& e : a.edges) {
      if (!resolve(e.source, e.source, "source")) return false;
      if (!resolve(e.target, e.target, "target")) return false;
    }
    return true;
  }

  bool close_tag(const std::string& name) {
    auto tag = sc.next_tag();
    if (!tag.has_value() || !tag->closing || tag->name != name) {
      if (!sc.failed())
        diags.push_back({"XML_MALFORMED", "expected </" + name + ">", sc.line(), 0});
      return false;
    }
    return true;
  }

  bool read_location(const XmlTag& open, TimedAutomatonDef& a) {
    LocationDef loc;
    std::string xml_id = open.attrs.count("id") ? open.attrs.at("id") : "";
    if (open.self_closing) {
      diags.push_back(
          {"XML_MALFORMED", "location without a <name> child", sc.line(), 0});
      return false;
    }
    for (;;) {
      sc.text_until_tag();
      auto tag = sc.next_tag();
      if (!tag.has_value()) return false;
      if (tag->closing && tag->name == "location") break;
      if (!tag->closing && tag->name == "name") {
        loc.id = trim(sc.text_until_tag());
        if (!close_tag("name")) return false;
      } else if (!tag->closing && tag->name == "label") {
        std::string kind = tag->attrs.count("kind") ? tag->attrs.at("kind") : "";
        std::string body = trim(sc.text_until_tag());
        if (!tag->self_closing && !close_tag("label")) return false;
        if (kind == "invariant") {
          auto inv = parse_invariant(body, diags);
          if (!inv.has_value()) return false;
          loc.invariant = *inv;
        }
      } else if (!tag->closing && !tag->self_closing) {
        sc.skip_element(tag->name);
      }
    }
    if (loc.id.empty()) {
      diags.push_back(
          {"XML_MALFORMED", "location without a <name> child", sc.line(), 0});
      return false;
    }
    id_to_name[xml_id] = loc.id;
    a.locations.push_back(std::move(loc));
    return true;
  }

  bool read_transition(const XmlTag& open, TimedAutomatonDef& a) {
    EdgeDef e;
    e.id = open.attrs.count("id") ? open.attrs.at("id")
                                  : "e" + std::to_string(++anon_edges);
    std::optional<Expr> guard;
    std::optional<Expr> sync_atom;
    for (;;) {
      sc.text_until_tag();
      auto tag = sc.next_tag();
      if (!tag.has_value()) return false;
      if (tag->closing && tag->name == "transition") break;
      if (!tag->closing && tag->name == "source") {
        e.source = tag->attrs.count("ref") ? tag->attrs.at("ref") : "";
        if (!tag->self_closing && !close_tag("source")) return false;
      } else if (!tag->closing && tag->name == "target") {
        e.target = tag->attrs.count("ref") ? tag->attrs.at("ref") : "";
        if (!tag->self_closing && !close_tag("target")) return false;
      } else if (!tag->closing && tag->name == "label") {
        std::string kind = tag->attrs.count("kind") ? tag->attrs.at("kind") : "";
        std::string body = trim(sc.text_until_tag());
        if (!tag->self_closing && !close_tag("label")) return false;
        if (kind == "guard") {
          std::vector<Diagnostic> expr_diags;
          guard = parse_ta_guard_text(body, decls, expr_diags);
          if (!guard.has_value()) {
            diags.push_back({"LABEL_SYNTAX",
                             a.name + "." + e.id + ": unparseable guard '" + body + "'",
                             0, 0});
            for (auto& d : expr_diags) diags.push_back(d);
            return false;
          }
        } else if (kind == "synchronisation") {
          if (body.size() < 2 || (body.back() != '!' && body.back() != '?')) {
            diags.push_back({"LABEL_SYNTAX", a.name + "." + e.id +
                                                 ": synchronisation '" + body +
                                                 "' must be `chan!` or `chan?`",
                             0, 0});
            return false;
          }
          std::string chan = trim(body.substr(0, body.size() - 1));
          sync_atom = body.back() == '!' ? Expr::chan_send(chan)
                                         : Expr::chan_recv(chan);
        } else if (kind == "assignment") {
          if (!parse_assignments(body, decls, e, diags)) return false;
        }
      } else if (!tag->closing && !tag->self_closing) {
        sc.skip_element(tag->name);  // nails and friends
      }
    }
    e.guard = rebuild_guard(sync_atom, guard);
    a.edges.push_back(std::move(e));
    return true;
  }
};

void infer_metadata(TimedAutomatonNetwork& ta) {
  int next_rho = 1;
  for (auto& a : ta.automata) {
    bool timed = std::any_of(a.locations.begin(), a.locations.end(),
                             [](const LocationDef& l) { return l.invariant.has_value(); });
    bool broadcaster = a.locations.size() == 1 && a.edges.size() == 1 &&
                       edge_sync(a.edges[0]).kind == SyncKind::Send;
    if (timed) {
      a.role = AutomatonRole::TimerAux;
      a.rho = 0;
    } else if (broadcaster) {
      a.role = AutomatonRole::EventAux;
      a.rho = 0;
    } else {
      a.role = AutomatonRole::Transformed;
      a.rho = next_rho++;
    }
  }

  for (const auto& a : ta.automata) {
    for (const auto& e : a.edges) {
      for (const auto& item : e.action.items) {
        if (const auto* inc = std::get_if<IncAlphaAction>(&item)) {
          ta.alpha_var = inc->var;
          ta.lockstep_n = inc->modulus;
        }
      }
    }
  }

  bool clocks = std::any_of(ta.variables.begin(), ta.variables.end(),
                            [](const VarDecl& v) { return v.kind == VarKind::Clock; });
  bool channels = std::any_of(
      ta.variables.begin(), ta.variables.end(),
      [](const VarDecl& v) { return v.kind == VarKind::Channel; });
  // Best effort: the document does not record how far the pipeline ran.
  if (!ta.alpha_var.empty()) ta.stage = 7;
  else if (clocks) ta.stage = 5;
  else if (channels) ta.stage = 4;
  else ta.stage = 1;
}

}  // namespace

UppaalReadResult read_uppaal_xml(const std::string& xml) {
  UppaalReadResult result;
  XmlScanner sc(xml, result.diagnostics);
  TimedAutomatonNetwork ta;

  auto root = sc.next_tag();
  if (!root.has_value() || root->name != "nta" || root->closing) {
    if (!sc.failed())
      result.diagnostics.push_back({"XML_MALFORMED", "expected <nta> root", sc.line(), 0});
    return result;
  }

  bool closed = false;
  while (!closed) {
    sc.text_until_tag();
    auto tag = sc.next_tag();
    if (!tag.has_value()) {
      if (!sc.failed())
        result.diagnostics.push_back({"XML_MALFORMED", "missing </nta>", sc.line(), 0});
      return result;
    }
    if (tag->closing && tag->name == "nta") {
      closed = true;
    } else if (tag->closing) {
      result.diagnostics.push_back(
          {"XML_MALFORMED", "stray </" + tag->name + ">", sc.line(), 0});
      return result;
    } else if (tag->name == "declaration") {
      std::string body = sc.text_until_tag();
      auto close = sc.next_tag();
      if (!close.has_value() || !close->closing || close->name != "declaration") {
        if (!sc.failed())
          result.diagnostics.push_back(
              {"XML_MALFORMED", "expected </declaration>", sc.line(), 0});
        return result;
      }
      if (!parse_declarations(body, ta.variables, result.diagnostics)) return result;
    } else if (tag->name == "template") {
      TimedAutomatonDef a;
      TemplateReader reader{sc, result.diagnostics, ta.variables, {}, {}, 0};
      if (!reader.read_into(a)) return result;
      ta.automata.push_back(std::move(a));
    } else if (!tag->self_closing) {
      sc.skip_element(tag->name);  // system line, queries, ...
    }
  }
  if (sc.failed()) return result;

  infer_metadata(ta);
  result.ta = std::move(ta);
  return result;
}

// ---------------------------------------------------------------------------
// Structural comparison
// ---------------------------------------------------------------------------

namespace {

struct DiffLog {
  std::vector<std::string>* out;
  bool equal = true;

  void note(const std::string& line) {
    equal = false;
    if (out != nullptr) out->push_back(line);
  }
};

std::string role_text(AutomatonRole role) {
  switch (role) {
    case AutomatonRole::Transformed: return "transformed";
    case AutomatonRole::EventAux: return "event-aux";
    case AutomatonRole::TimerAux: return "timer-aux";
  }
  return "?";
}

}  // namespace

bool structurally_equal(const TimedAutomatonNetwork& a, const TimedAutomatonNetwork& b,
                        std::vector<std::string>* differences) {
  DiffLog log{differences};

  if (a.variables != b.variables) log.note("variable declarations differ");
  if (a.alpha_var != b.alpha_var)
    log.note("lockstep variable: '" + a.alpha_var + "' vs '" + b.alpha_var + "'");
  if (a.lockstep_n != b.lockstep_n)
    log.note("lockstep modulus: " + std::to_string(a.lockstep_n) + " vs " +
             std::to_string(b.lockstep_n));

  if (a.automata.size() != b.automata.size()) {
    log.note("automata count: " + std::to_string(a.automata.size()) + " vs " +
             std::to_string(b.automata.size()));
    return log.equal;
  }
  for (std::size_t i = 0; i < a.automata.size(); ++i) {
    const auto& x = a.automata[i];
    const auto& y = b.automata[i];
    std::string who = "automaton " + x.name;
    if (x.name != y.name) {
      log.note("automaton " + std::to_string(i) + ": name '" + x.name + "' vs '" +
               y.name + "'");
      continue;
    }
    if (x.role != y.role)
      log.note(who + ": role " + role_text(x.role) + " vs " + role_text(y.role));
    if (x.rho != y.rho)
      log.note(who + ": priority " + std::to_string(x.rho) + " vs " +
               std::to_string(y.rho));
    if (x.initial != y.initial)
      log.note(who + ": initial '" + x.initial + "' vs '" + y.initial + "'");

    if (x.locations.size() != y.locations.size()) {
      log.note(who + ": location count differs");
    } else {
      for (std::size_t k = 0; k < x.locations.size(); ++k) {
        if (x.locations[k].id != y.locations[k].id) {
          log.note(who + ": location " + std::to_string(k) + " id differs");
        } else if (x.locations[k].invariant != y.locations[k].invariant) {
          log.note(who + "." + x.locations[k].id + ": invariant differs");
        }
      }
    }

    if (x.edges.size() != y.edges.size()) {
      log.note(who + ": edge count differs");
      continue;
    }
    for (std::size_t k = 0; k < x.edges.size(); ++k) {
      const auto& p = x.edges[k];
      const auto& q = y.edges[k];
      std::string edge = who + "." + p.id;
      if (p.id != q.id) {
        log.note(who + ": edge " + std::to_string(k) + " id '" + p.id + "' vs '" +
                 q.id + "'");
        continue;
      }
      if (p.source != q.source || p.target != q.target)
        log.note(edge + ": endpoints differ");
      if (!expr_equal(p.guard, q.guard)) log.note(edge + ": guard differs");
      if (!actions_equal(p.action, q.action)) log.note(edge + ": action differs");
      if (p.clock_resets != q.clock_resets) log.note(edge + ": clock resets differ");
    }
  }
  return log.equal;
}

}  // namespace scforge
