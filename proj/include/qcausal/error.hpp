#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcausal {

enum class ErrorKind {
  InvalidInput,
  NotPositiveSemidefinite,
  IncompleteInstrument,
  DegenerateMeasurement,
  EmptyConditioner,
  NumericalInstability,
  InsufficientData,
  DegenerateSeries,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorKind::IncompleteInstrument: return "IncompleteInstrument";
    case ErrorKind::DegenerateMeasurement: return "DegenerateMeasurement";
    case ErrorKind::EmptyConditioner: return "EmptyConditioner";
    case ErrorKind::NumericalInstability: return "NumericalInstability";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::DegenerateSeries: return "DegenerateSeries";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace qcausal
