#pragma once

#include <map>
#include <string>

namespace porthos {

/// Final state of an execution: one value per location, and optionally per
/// register (registers keyed as "tid.reg").
struct State {
  std::map<std::string, long> locations;
  std::map<std::string, long> registers;

  bool operator==(const State& o) const {
    return locations == o.locations && registers == o.registers;
  }
  bool operator<(const State& o) const {
    if (locations != o.locations) return locations < o.locations;
    return registers < o.registers;
  }

  std::string str() const {
    std::string s;
    for (auto& [l, v] : locations) s += l + "=" + std::to_string(v) + " ";
    for (auto& [r, v] : registers) s += r + "=" + std::to_string(v) + " ";
    if (!s.empty()) s.pop_back();
    return s;
  }
};

} // namespace porthos
