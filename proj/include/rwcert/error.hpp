#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rwcert {

enum class ErrorKind {
  syntax,
  unknown_identifier,
  domain,
  format,
  symmetry,
  dimension,
  precondition,
  degenerate,
  classification,
  integration,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::unknown_identifier: return "unknown_identifier";
    case ErrorKind::domain: return "domain";
    case ErrorKind::format: return "format";
    case ErrorKind::symmetry: return "symmetry";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::classification: return "classification";
    case ErrorKind::integration: return "integration";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Errors caused by malformed user input (CLI exit code 2).
  bool is_input_error() const noexcept {
    switch (kind_) {
      case ErrorKind::syntax:
      case ErrorKind::unknown_identifier:
      case ErrorKind::format:
      case ErrorKind::symmetry:
      case ErrorKind::dimension:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error(ErrorKind::syntax, message + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifierError : public Error {
 public:
  UnknownIdentifierError(const std::string& name, std::size_t offset)
      : Error(ErrorKind::unknown_identifier,
              "unknown identifier '" + name + "' at byte " + std::to_string(offset)),
        name_(name),
        offset_(offset) {}
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

/// Argument outside the real domain of an elementary function.
///
/// `span_begin`/`span_end` locate the offending subexpression in its source
/// text once the evaluator has annotated the error; both are zero before that.
class DomainError : public Error {
 public:
  DomainError(std::string fn, double value, std::string detail = {})
      : Error(ErrorKind::domain, compose(fn, value, detail)),
        fn_(std::move(fn)),
        value_(value),
        detail_(std::move(detail)) {}

  const std::string& fn() const noexcept { return fn_; }
  double value() const noexcept { return value_; }
  std::size_t span_begin() const noexcept { return span_begin_; }
  std::size_t span_end() const noexcept { return span_end_; }

  DomainError annotated(std::size_t begin, std::size_t end, const std::string& text) const {
    DomainError e(fn_, value_, detail_ + " in '" + text + "' [" + std::to_string(begin) + "," +
                                   std::to_string(end) + ")");
    e.span_begin_ = begin;
    e.span_end_ = end;
    return e;
  }

 private:
  static std::string compose(const std::string& fn, double value, const std::string& detail) {
    return fn + ": argument " + std::to_string(value) + " outside domain" + detail;
  }

  std::string fn_;
  double value_;
  std::string detail_;
  std::size_t span_begin_ = 0;
  std::size_t span_end_ = 0;
};

class SymmetryError : public Error {
 public:
  SymmetryError(int i, int j)
      : Error(ErrorKind::symmetry, "metric is not symmetric: entries (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") and (" + std::to_string(j) + "," +
                                       std::to_string(i) + ") differ"),
        i_(i),
        j_(j) {}
  int row() const noexcept { return i_; }
  int col() const noexcept { return j_; }

 private:
  int i_;
  int j_;
};

}  // namespace rwcert
