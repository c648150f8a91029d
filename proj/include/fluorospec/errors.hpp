#pragma once

#include <stdexcept>
#include <string>

namespace fluorospec {

// Numerical failures (CLI exit code 2).
struct SingularDynamics : std::runtime_error {
  explicit SingularDynamics(const std::string& what) : std::runtime_error(what) {}
};

struct PositivityBreach : std::runtime_error {
  explicit PositivityBreach(const std::string& what) : std::runtime_error(what) {}
};

struct NotUnimodal : std::runtime_error {
  explicit NotUnimodal(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureFailure : std::runtime_error {
  explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientWindow : std::runtime_error {
  explicit InsufficientWindow(const std::string& what) : std::runtime_error(what) {}
};

// Input failures (CLI exit code 1).
struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what), line_number(0) {}
  int line_number;
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fluorospec
