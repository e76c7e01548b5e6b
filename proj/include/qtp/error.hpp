#pragma once

#include <stdexcept>
#include <string>

namespace qtp {

/// Bad input data: malformed files, schema violations, out-of-range values.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// QASM syntax or semantic error with a source location (1-based).
class ParseError : public DataError {
 public:
  ParseError(const std::string& msg, int line, int column)
      : DataError("line " + std::to_string(line) + ", column " +
                  std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Command-line misuse.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qtp
