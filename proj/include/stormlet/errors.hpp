#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stormlet {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in a model, explicit file or property text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column,
             std::vector<std::string> expected = {});

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

/// Semantic problems in a program: duplicate identifiers, type errors,
/// missing constants.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Errors raised while exploring the state space.
class BuildError : public Error {
 public:
  using Error::Error;
};

/// A property or model/solver combination outside the supported subset.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A numeric solver hit its iteration cap.
class SolverError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

/// Cooperative wall-clock limit checked inside long-running loops.
class Deadline {
 public:
  Deadline() = default;
  static Deadline after(std::chrono::milliseconds budget) {
    Deadline d;
    d.at_ = std::chrono::steady_clock::now() + budget;
    return d;
  }

  bool expired() const {
    return at_ && std::chrono::steady_clock::now() > *at_;
  }

  void check() const {
    if (expired()) throw TimeoutError("time limit exceeded");
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> at_;
};

}  // namespace stormlet
