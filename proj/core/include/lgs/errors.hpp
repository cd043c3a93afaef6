#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lgs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// handle_event called with the direction already ordered.
class NoOpHandleMove : public Error {
 public:
  NoOpHandleMove() : Error("handle already in the requested position") {}
};

class ScenarioParseError : public Error {
 public:
  ScenarioParseError(std::size_t line, std::string field, const std::string& why)
      : Error("line " + std::to_string(line) + ", field '" + field + "': " + why),
        line_(line),
        field_(std::move(field)) {}
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class TraceFormatError : public Error {
 public:
  using Error::Error;
};

class CatalogMismatch : public Error {
 public:
  using Error::Error;
};

class NotReproducible : public Error {
 public:
  using Error::Error;
};

}  // namespace lgs
