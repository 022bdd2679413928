#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ppstar {

enum class ErrorKind {
  Dimension,       // operand shapes disagree
  Precondition,    // documented precondition violated
  Parse,           // formula text rejected; carries a position
  Schema,          // structure file rejected; carries a JSON path
  TypeMismatch,    // extend() called on tuples of different type
  BasisIncomplete, // formula basis too small to certify a result
  SizeLimit,       // structure too large for exhaustive search
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(ErrorKind::Parse, message), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(ErrorKind::Schema, message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace ppstar
