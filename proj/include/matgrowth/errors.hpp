#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace matgrowth {

/// Input violates a documented operation precondition.
class PreconditionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An iterative method hit its cap before reaching the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last)
      : std::runtime_error(what), last_estimate(last) {}
  double last_estimate;
};

/// The analysis does not cover this input (e.g. nilpotent extremal matrix).
class UnsupportedError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A requested enumeration would exceed the configured cap.
class CapExceededError : public std::runtime_error {
 public:
  CapExceededError(const std::string& what, std::uint64_t n)
      : std::runtime_error(what), size(n) {}
  std::uint64_t size;
};

/// Linear-algebra failure: singular system, inconsistent operands,
/// or an internal identity that should hold by theory does not.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Text or JSON input could not be parsed; carries a 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line_, int column_)
      : std::runtime_error(what + " (line " + std::to_string(line_) +
                           ", column " + std::to_string(column_) + ")"),
        line(line_),
        column(column_) {}
  int line;
  int column;
};

}  // namespace matgrowth
