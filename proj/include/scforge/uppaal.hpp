#pragma once

#include "scforge/transform.hpp"
#include "scforge/verify.hpp"

namespace scforge {

// ---------------------------------------------------------------------------
// UPPAAL model / query serialization
// ---------------------------------------------------------------------------

/// Constructs the exporter had to flag rather than translate. Today that is
/// one case: channel atoms that cannot become a synchronisation label
/// (negated receives, atoms beyond the first conjunct). They are emitted
/// verbatim in the guard text together with a WARN comment, and listed here
/// with code UNSUPPORTED_CONSTRUCT naming the edge.
struct ExportReport {
  std::vector<Diagnostic> warnings;
};

/// Renders the network as an UPPAAL `<nta>` document (flat-1_1 DTD): one
/// global declaration block in variable order, one template per automaton,
/// and a system line instantiating every template once. The first channel
/// atom among a guard's top-level conjuncts becomes the edge's
/// synchronisation label; the lockstep bump renders inline as
/// `alpha = alpha % n + 1` and once more as a callable update in the
/// declarations. The map contributes source-annotation comments only.
/// Output is byte-stable: equal inputs give equal documents.
std::string write_uppaal_xml(const TimedAutomatonNetwork& ta,
                             const TransformMap& map,
                             ExportReport* report = nullptr);

/// One query per line in UPPAAL query syntax, names as `//` comment lines.
/// An empty property list yields an empty document.
std::string write_queries(const std::vector<SafetyProperty>& props);

// ---------------------------------------------------------------------------
// Read-back
// ---------------------------------------------------------------------------

struct UppaalReadResult {
  std::optional<TimedAutomatonNetwork> ta;  // absent when diagnostics are fatal
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return ta.has_value() && diagnostics.empty(); }
};
// diagnostic codes:
//   XML_MALFORMED   tag soup: mismatched or truncated markup
//   DECL_SYNTAX     unparseable global declaration
//   LABEL_SYNTAX    unparseable guard/assignment/invariant/sync label
//   REF_UNKNOWN     init/source/target ref naming no location

/// Parses the subset of UPPAAL XML this exporter writes (other producers'
/// files work when they stay inside that subset; unknown elements and label
/// kinds are skipped). Automaton roles, priorities and the lockstep metadata
/// are reconstructed from structure: locations with clock invariants mark
/// timer automata, single-location single-send-edge templates mark event
/// broadcasters, and `alpha = alpha % n + 1` updates identify the lockstep
/// index and its modulus.
UppaalReadResult read_uppaal_xml(const std::string& xml);

/// Compares everything the XML encodes: declarations in order, automata in
/// order (name, role, priority, locations with invariants, initial location,
/// edges with ids, endpoints, guards, actions and clock resets) and the
/// lockstep metadata. The stage counter is not serialized and is ignored.
/// When `differences` is given, one line per mismatch is appended.
bool structurally_equal(const TimedAutomatonNetwork& a,
                        const TimedAutomatonNetwork& b,
                        std::vector<std::string>* differences = nullptr);

}  // namespace scforge
