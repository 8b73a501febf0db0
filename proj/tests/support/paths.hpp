#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace scforge::testing {

inline std::string fixtures_dir() {
  const char* env = std::getenv("SCFORGE_FIXTURES");
  return env != nullptr ? env : "fixtures";
}

inline std::string golden_dir() {
  const char* env = std::getenv("SCFORGE_GOLDEN");
  return env != nullptr ? env : "tests/golden";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string fixture(const std::string& name) {
  return read_file(fixtures_dir() + "/" + name);
}

inline std::string golden(const std::string& name) {
  return read_file(golden_dir() + "/" + name);
}

}  // namespace scforge::testing
