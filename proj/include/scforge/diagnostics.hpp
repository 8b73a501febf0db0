#pragma once

#include <string>
#include <vector>

namespace scforge {

/// A single validation or parse finding. `code` is machine-readable and
/// stable; `message` is for humans. Positions are 1-based; 0 means "whole
/// file" (structural checks that have no useful anchor).
struct Diagnostic {
  std::string code;
  std::string message;
  int line = 0;
  int column = 0;

  bool operator==(const Diagnostic&) const = default;
};

std::string format_diagnostic(const Diagnostic& d);
std::string format_diagnostics(const std::vector<Diagnostic>& ds);

/// True if any diagnostic in the list carries the given code.
bool has_diagnostic(const std::vector<Diagnostic>& ds, const std::string& code);

}  // namespace scforge
