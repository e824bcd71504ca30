#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geomech {

// Every library error derives from Error so callers (the CLI in particular)
// can map the whole family onto a single exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSkew : public Error {
 public:
  using Error::Error;
};

class InvalidInertia : public Error {
 public:
  using Error::Error;
};

class InvalidStep : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  GridMismatch() : Error("fields live on different grids") {}
  using Error::Error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class CflViolation : public Error {
 public:
  using Error::Error;
};

class NotDivergenceFree : public Error {
 public:
  using Error::Error;
};

class TimeRangeError : public Error {
 public:
  using Error::Error;
};

class BandLimitExceeded : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MissingKey : public Error {
 public:
  explicit MissingKey(std::string key)
      : Error("missing required key '" + key + "'"), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace geomech
