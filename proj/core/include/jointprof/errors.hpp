#ifndef JOINTPROF_ERRORS_HPP
#define JOINTPROF_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace jointprof {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A network, assignment or CPT violates a structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

enum class Severity { kError, kWarning };

// One parser message, pointing into the source text (1-based).
struct ParseDiagnostic {
  Severity severity = Severity::kError;
  int line = 1;
  int column = 1;
  std::string message;

  std::string to_string() const {
    return std::string(severity == Severity::kError ? "error" : "warning") + " at " +
           std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }
};

class ParseError : public Error {
 public:
  ParseError(std::string msg, std::vector<ParseDiagnostic> diagnostics)
      : Error(std::move(msg)), diagnostics_(std::move(diagnostics)) {}
  explicit ParseError(ParseDiagnostic diag)
      : Error(diag.to_string()), diagnostics_{std::move(diag)} {}

  const std::vector<ParseDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<ParseDiagnostic> diagnostics_;
};

// A 0 or 1 probability makes the log-moments of the affected variable
// undefined (ln 0 has no moments; a sure outcome has no spread).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// An exact operation was asked to visit more states than its cap allows.
class CapExceededError : public Error {
 public:
  CapExceededError(const std::string& msg, std::uint64_t required_cap)
      : Error(msg), required_cap_(required_cap) {}

  std::uint64_t required_cap() const { return required_cap_; }

 private:
  std::uint64_t required_cap_;
};

}  // namespace jointprof

#endif  // JOINTPROF_ERRORS_HPP
