// scforge: command-line front door for the statechart → timed-automata
// toolkit. One binary, six subcommands:
//
//   validate   parse + validate a network file, report diagnostics
//   transform  rewrite into timed automata, print the canonical text
//   simulate   run either side under a schedule, print the trace
//   equiv      co-simulate both sides under random schedules
//   verify     exhaustive bounded check of safety properties
//   export     write an UPPAAL model.xml and queries.q
//
// Exit codes are a stable contract: 0 success / holds / equivalent,
// 1 property-or-equivalence failure, 2 usage or validation error, 3 I/O.
// Every flag can also be set through an SCFORGE_* environment variable;
// explicit flags win over the environment, which wins over defaults.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scforge/equivalence.hpp"
#include "scforge/uppaal.hpp"
#include "scforge/verify.hpp"

namespace {

using namespace scforge;

constexpr int kOk = 0;
constexpr int kFinding = 1;  // a property fails or the sides diverge
constexpr int kUsage = 2;    // bad flags, bad input files
constexpr int kIo = 3;       // unreadable or unwritable paths

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool spill(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  out.close();
  return !out.fail();
}

nlohmann::json diagnostics_json(const std::vector<Diagnostic>& ds) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Diagnostic& d : ds)
    arr.push_back({{"code", d.code},
                   {"message", d.message},
                   {"line", d.line},
                   {"column", d.column}});
  return arr;
}

// Reads, parses and validates a network file. On failure prints what went
// wrong and returns the exit code to propagate; on success fills `out`.
int load_network(const std::string& path, StatechartNetwork& out) {
  std::optional<std::string> text = slurp(path);
  if (!text) {
    std::cerr << "error: cannot read " << path << "\n";
    return kIo;
  }
  ParseResult pr = parse_network(*text);
  if (!pr.ok()) {
    std::cerr << format_diagnostics(pr.diagnostics);
    return kUsage;
  }
  std::vector<Diagnostic> semantic = validate(*pr.network);
  if (!semantic.empty()) {
    std::cerr << format_diagnostics(semantic);
    return kUsage;
  }
  out = std::move(*pr.network);
  return kOk;
}

int cmd_validate(const std::string& path, const std::string& format) {
  std::optional<std::string> text = slurp(path);
  if (!text) {
    std::cerr << "error: cannot read " << path << "\n";
    return kIo;
  }
  ParseResult pr = parse_network(*text);
  std::vector<Diagnostic> all = pr.diagnostics;
  if (pr.network.has_value()) {
    std::vector<Diagnostic> semantic = validate(*pr.network);
    all.insert(all.end(), semantic.begin(), semantic.end());
  }
  if (format == "json") {
    nlohmann::json j{{"command", "validate"},
                     {"file", path},
                     {"ok", all.empty()},
                     {"diagnostics", diagnostics_json(all)}};
    std::cout << j.dump(2) << "\n";
  } else if (all.empty()) {
    std::cout << "ok: " << path << "\n";
  } else {
    std::cout << format_diagnostics(all);
  }
  return all.empty() ? kOk : kUsage;
}

int cmd_transform(const std::string& path, int stage,
                  const std::string& out_path) {
  StatechartNetwork net;
  if (int rc = load_network(path, net); rc != kOk) return rc;
  TransformOptions opts;
  opts.stage = stage;
  std::string text = dump_ta_network(transform_network(net, opts).ta);
  if (out_path.empty()) {
    std::cout << text;
    return kOk;
  }
  if (!spill(out_path, text)) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kIo;
  }
  return kOk;
}

int cmd_simulate(const std::string& path, const std::string& side,
                 const std::string& schedule_path, int horizon,
                 const std::string& out_path) {
  StatechartNetwork net;
  if (int rc = load_network(path, net); rc != kOk) return rc;
  EventEnv env;
  if (!schedule_path.empty()) {
    std::optional<std::string> stext = slurp(schedule_path);
    if (!stext) {
      std::cerr << "error: cannot read " << schedule_path << "\n";
      return kIo;
    }
    std::vector<Diagnostic> diags;
    env = parse_schedule(*stext, net, diags);
    if (!diags.empty()) {
      std::cerr << format_diagnostics(diags);
      return kUsage;
    }
  }
  std::string text;
  try {
    if (side == "sc") {
      text = dump_trace(run(net, env, horizon));
    } else {
      TransformResult tr = transform_network(net);
      text = dump_ta_trace(tr.ta, ta_run(tr.ta, env, horizon));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: simulation failed: " << e.what() << "\n";
    return kFinding;
  }
  if (out_path.empty()) {
    std::cout << text;
    return kOk;
  }
  if (!spill(out_path, text)) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kIo;
  }
  return kOk;
}

int cmd_equiv(const std::string& path, int schedules, int horizon,
              std::uint64_t seed, int jobs, const std::vector<int>& skip,
              const std::string& format) {
  StatechartNetwork net;
  if (int rc = load_network(path, net); rc != kOk) return rc;
  TransformOptions opts;
  opts.skip = std::set<int>(skip.begin(), skip.end());
  TransformResult tr;
  try {
    tr = transform_network(net, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: transformation failed: " << e.what() << "\n";
    return kUsage;
  }
  std::vector<std::string> names = net.event_names();
  std::set<std::string> events(names.begin(), names.end());
  std::vector<EventEnv> envs = random_schedules(events, seed, schedules, horizon);
  EquivalenceReport report =
      check_model_equivalence(net, tr.ta, tr.map, envs, horizon, jobs);
  report.seed = seed;
  if (format == "json") {
    nlohmann::json j{{"command", "equiv"},
                     {"equivalent", report.equivalent},
                     {"schedules", report.schedules_tested},
                     {"horizon", report.horizon},
                     {"seed", seed},
                     {"jobs", jobs}};
    if (report.first_divergence.has_value()) {
      const Divergence& d = *report.first_divergence;
      j["divergence"] = {{"schedule_index", d.schedule_index},
                         {"status_index", d.status_index},
                         {"source_status", d.left_status},
                         {"transformed_status", d.right_status},
                         {"source_label", d.left_label},
                         {"transformed_label", d.right_label},
                         {"message", d.message},
                         {"schedule", d.schedule_text}};
    } else {
      j["divergence"] = nullptr;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << equivalence_report_to_text(report);
  }
  return report.equivalent ? kOk : kFinding;
}

int cmd_verify(const std::string& path, const std::string& props_path,
               int max_cycles, const std::string& format) {
  StatechartNetwork net;
  if (int rc = load_network(path, net); rc != kOk) return rc;
  std::optional<std::string> ptext = slurp(props_path);
  if (!ptext) {
    std::cerr << "error: cannot read " << props_path << "\n";
    return kIo;
  }
  std::vector<Diagnostic> diags;
  std::vector<SafetyProperty> props = parse_properties(*ptext, net, diags);
  if (!diags.empty()) {
    std::cerr << format_diagnostics(diags);
    return kUsage;
  }
  if (props.empty()) {
    std::cerr << "error: no properties in " << props_path << "\n";
    return kUsage;
  }
  bool all_hold = true;
  std::ostringstream text;
  nlohmann::json results = nlohmann::json::array();
  for (const SafetyProperty& prop : props) {
    VerifyResult r;
    try {
      r = check_invariant(net, prop, max_cycles);
    } catch (const VerifyError& e) {
      std::cerr << "error: " << e.code << ": " << e.what() << "\n";
      return kUsage;
    }
    all_hold = all_hold && r.holds;
    if (format == "json") {
      nlohmann::json entry{{"name", prop.name},
                           {"holds", r.holds},
                           {"nodes_expanded", r.nodes_expanded},
                           {"statuses_seen", r.statuses_seen}};
      if (r.counterexample.has_value()) {
        entry["counterexample"] = {
            {"schedule", schedule_to_text(r.counterexample->schedule)},
            {"trace", dump_trace(r.counterexample->trace)}};
      } else {
        entry["counterexample"] = nullptr;
      }
      results.push_back(entry);
    } else if (r.holds) {
      text << prop.name << ": holds (" << r.nodes_expanded
           << " nodes expanded, " << r.statuses_seen << " statuses seen)\n";
    } else {
      text << prop.name << ": FAILS\n"
           << counterexample_to_text(*r.counterexample);
    }
  }
  if (format == "json") {
    nlohmann::json j{{"command", "verify"},
                     {"max_cycles", max_cycles},
                     {"all_hold", all_hold},
                     {"properties", results}};
    std::cout << j.dump(2) << "\n";
  } else {
    text << "verdict: " << (all_hold ? "all properties hold" : "violated")
         << " (max cycles " << max_cycles << ")\n";
    std::cout << text.str();
  }
  return all_hold ? kOk : kFinding;
}

int cmd_export(const std::string& path, const std::string& out_dir,
               const std::string& props_path) {
  StatechartNetwork net;
  if (int rc = load_network(path, net); rc != kOk) return rc;
  std::vector<SafetyProperty> props;
  if (!props_path.empty()) {
    std::optional<std::string> ptext = slurp(props_path);
    if (!ptext) {
      std::cerr << "error: cannot read " << props_path << "\n";
      return kIo;
    }
    std::vector<Diagnostic> diags;
    props = parse_properties(*ptext, net, diags);
    if (!diags.empty()) {
      std::cerr << format_diagnostics(diags);
      return kUsage;
    }
  }
  TransformResult tr = transform_network(net);
  ExportReport report;
  std::string xml = write_uppaal_xml(tr.ta, tr.map, &report);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << ": " << ec.message()
              << "\n";
    return kIo;
  }
  const std::string model_path =
      (std::filesystem::path(out_dir) / "model.xml").string();
  const std::string query_path =
      (std::filesystem::path(out_dir) / "queries.q").string();
  if (!spill(model_path, xml)) {
    std::cerr << "error: cannot write " << model_path << "\n";
    return kIo;
  }
  if (!spill(query_path, write_queries(props))) {
    std::cerr << "error: cannot write " << query_path << "\n";
    return kIo;
  }
  for (const Diagnostic& w : report.warnings)
    std::cerr << "warning: " << format_diagnostic(w) << "\n";
  std::cout << "wrote " << model_path << "\n";
  std::cout << "wrote " << query_path << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "scforge: statechart networks — synchronous execution, rewriting to "
      "timed automata, equivalence checking, bounded verification, UPPAAL "
      "export"};
  app.require_subcommand(1);

  std::string v_path, v_format = "text";
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Parse a network file and report diagnostics");
  validate_cmd->add_option("file", v_path, "network file")->required();
  validate_cmd->add_option("--format", v_format, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->envname("SCFORGE_FORMAT");

  std::string t_path, t_out;
  int t_stage = 7;
  CLI::App* transform_cmd = app.add_subcommand(
      "transform", "Rewrite into timed automata and print the canonical text");
  transform_cmd->add_option("file", t_path, "network file")->required();
  transform_cmd
      ->add_option("--emit-stage", t_stage, "stop after this rewrite rule (1-7)")
      ->check(CLI::Range(1, 7))
      ->envname("SCFORGE_EMIT_STAGE");
  transform_cmd->add_option("--out", t_out, "output file (default: stdout)");

  std::string s_path, s_side = "sc", s_schedule, s_out;
  int s_horizon = 10;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Run one side under a schedule and print the trace");
  simulate_cmd->add_option("file", s_path, "network file")->required();
  simulate_cmd
      ->add_option("--side", s_side, "sc (source) or ta (transformed)")
      ->check(CLI::IsMember({"sc", "ta"}));
  simulate_cmd->add_option("--schedule", s_schedule,
                           "event schedule file (default: no events)");
  simulate_cmd->add_option("--horizon", s_horizon, "macro-cycles to run")
      ->check(CLI::NonNegativeNumber)
      ->envname("SCFORGE_HORIZON");
  simulate_cmd->add_option("--out", s_out, "output file (default: stdout)");

  std::string e_path, e_format = "text";
  int e_schedules = 100, e_horizon = 50, e_jobs = 1;
  std::uint64_t e_seed = 1;
  std::vector<int> e_skip;
  CLI::App* equiv_cmd = app.add_subcommand(
      "equiv", "Co-simulate both sides under random schedules and compare");
  equiv_cmd->add_option("file", e_path, "network file")->required();
  equiv_cmd->add_option("--schedules", e_schedules, "number of random schedules")
      ->check(CLI::PositiveNumber)
      ->envname("SCFORGE_SCHEDULES");
  equiv_cmd->add_option("--horizon", e_horizon, "macro-cycles per schedule")
      ->check(CLI::PositiveNumber)
      ->envname("SCFORGE_HORIZON");
  equiv_cmd
      ->add_option("--seed", e_seed, "schedule generator seed (printed in the report)")
      ->envname("SCFORGE_SEED");
  equiv_cmd
      ->add_option("--jobs", e_jobs, "worker threads; the verdict does not depend on it")
      ->check(CLI::PositiveNumber)
      ->envname("SCFORGE_JOBS");
  equiv_cmd
      ->add_option("--skip-rule", e_skip,
                   "drop a rewrite rule 2-7 before comparing (testing hook)")
      ->check(CLI::Range(2, 7));
  equiv_cmd->add_option("--format", e_format, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->envname("SCFORGE_FORMAT");

  std::string y_path, y_props, y_format = "text";
  int y_cycles = 25;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Exhaustively check safety properties up to a cycle bound");
  verify_cmd->add_option("file", y_path, "network file")->required();
  verify_cmd->add_option("--props", y_props, "property file")->required();
  verify_cmd->add_option("--max-cycles", y_cycles, "exploration depth in macro-cycles")
      ->check(CLI::PositiveNumber)
      ->envname("SCFORGE_MAX_CYCLES");
  verify_cmd->add_option("--format", y_format, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->envname("SCFORGE_FORMAT");

  std::string x_path, x_out, x_props;
  CLI::App* export_cmd = app.add_subcommand(
      "export", "Write UPPAAL model.xml and queries.q for the transformed network");
  export_cmd->add_option("file", x_path, "network file")->required();
  export_cmd->add_option("--out", x_out, "output directory")->required();
  export_cmd->add_option("--props", x_props,
                         "property file rendered into queries.q");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*validate_cmd) return cmd_validate(v_path, v_format);
  if (*transform_cmd) return cmd_transform(t_path, t_stage, t_out);
  if (*simulate_cmd)
    return cmd_simulate(s_path, s_side, s_schedule, s_horizon, s_out);
  if (*equiv_cmd)
    return cmd_equiv(e_path, e_schedules, e_horizon, e_seed, e_jobs, e_skip,
                     e_format);
  if (*verify_cmd) return cmd_verify(y_path, y_props, y_cycles, y_format);
  if (*export_cmd) return cmd_export(x_path, x_out, x_props);
  return kUsage;
}
