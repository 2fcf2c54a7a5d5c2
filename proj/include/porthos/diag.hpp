#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace porthos {

struct Diagnostic {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string message;
  int line = 0; // 1-based, 0 = no position
  int column = 0;

  std::string str() const {
    std::string s = severity == Severity::error ? "error" : "warning";
    if (line > 0)
      s += " at " + std::to_string(line) + ":" + std::to_string(column);
    return s + ": " + message;
  }
};

/// Thrown by parsers on malformed input; carries line/column.
struct parse_error : std::runtime_error {
  int line;
  int column;
  parse_error(const std::string& msg, int line_ = 0, int column_ = 0)
      : std::runtime_error(line_ > 0 ? std::to_string(line_) + ":" + std::to_string(column_) +
                                           ": " + msg
                                     : msg),
        line(line_),
        column(column_) {}
};

} // namespace porthos
