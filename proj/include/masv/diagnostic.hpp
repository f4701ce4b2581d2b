#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace masv {

/// Location of a construct in the specification source. `line` and
/// `column` are 1-based; `offset`/`length` are byte positions.
struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  int line = 1;
  int column = 1;

  // Spans are positional metadata; they never take part in AST equality.
  friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }
};

struct Diagnostic {
  SourceSpan span;
  std::string message;

  std::string format(const std::string& file = {}) const {
    std::string prefix = file.empty() ? std::string{} : file + ":";
    return prefix + std::to_string(span.line) + ":" + std::to_string(span.column) + ": error: " +
           message;
  }
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace masv
