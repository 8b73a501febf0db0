#include "scforge/diagnostics.hpp"

#include <sstream>

namespace scforge {

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  if (d.line > 0) {
    os << d.line << ":" << d.column << ": ";
  }
  os << d.code << ": " << d.message;
  return os.str();
}

std::string format_diagnostics(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    out += format_diagnostic(d);
    out += '\n';
  }
  return out;
}

bool has_diagnostic(const std::vector<Diagnostic>& ds, const std::string& code) {
  for (const auto& d : ds) {
    if (d.code == code) return true;
  }
  return false;
}

}  // namespace scforge
