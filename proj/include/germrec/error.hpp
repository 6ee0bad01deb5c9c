#pragma once

#include <stdexcept>
#include <string>

namespace germrec {

enum class ErrorCode {
  GridMismatch,
  SupportOverflow,
  ScaleTooLarge,
  DegenerateSystem,
  ArityMismatch,
  NotConvergent,
  ParameterViolation,
  HypothesisViolated,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SupportOverflow: return "SupportOverflow";
    case ErrorCode::ScaleTooLarge: return "ScaleTooLarge";
    case ErrorCode::DegenerateSystem: return "DegenerateSystem";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::NotConvergent: return "NotConvergent";
    case ErrorCode::ParameterViolation: return "ParameterViolation";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
  }
  return "Unknown";
}

}  // namespace germrec
