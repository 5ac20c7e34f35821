#pragma once

// Loads the shipped specification and demonstration fixtures.

#include <string>
#include <vector>

#include "stlfd/io.hpp"

namespace fixtures {

inline std::string path(const std::string& rel) { return std::string(STLFD_DATA_DIR) + "/" + rel; }

inline stlfd::SpecGraph specs(const std::string& name) {
  return stlfd::io::parse_specs(stlfd::io::read_text(path("specs/" + name + ".json")));
}

inline std::vector<stlfd::Trace> demos(const stlfd::Environment& env, const std::vector<std::string>& names) {
  std::vector<stlfd::Trace> out;
  for (const auto& n : names) {
    out.push_back(stlfd::io::parse_demo(env, stlfd::io::read_text(path("demos/" + n + ".json"))));
  }
  return out;
}

}  // namespace fixtures
