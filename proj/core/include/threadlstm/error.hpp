#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace threadlstm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Structural problems in a set of comment records.
class ThreadError : public Error {
public:
  enum class Kind { DuplicateId, MissingRoot, MultipleRoots, DanglingParent, Cycle, TimeOrder };

  ThreadError(Kind kind, std::string id, const std::string& what)
      : Error(what), kind_(kind), id_(std::move(id)) {}

  Kind kind() const noexcept { return kind_; }
  /// The offending comment id (or parent id for DanglingParent).
  const std::string& id() const noexcept { return id_; }

private:
  Kind kind_;
  std::string id_;
};

/// Malformed or schema-violating input text; line is 1-based, 0 when unknown.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// Non-finite values in a loss or gradient.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Invalid arguments or configuration (empty training sets, alpha out of range, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace threadlstm
