#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdr {

enum class ErrorKind {
  InvalidArgument,
  ZeroMarginalDensity,
  UnsupportedSampler,
  SamplerExhausted,
  SupportViolation,
  NonMonotoneMap,
  DegeneratePrior,
  NoiseTooLarge,
  OutOfRange,
  GridTooLarge,
  AssumptionAViolated,
  SingularKernelMatrix,
  UnsupportedDomain,
  RankOutOfRange,
  ScenarioFormat,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library reports on purpose goes through this type; the
// kind names the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroMarginalDensity: return "ZeroMarginalDensity";
    case ErrorKind::UnsupportedSampler: return "UnsupportedSampler";
    case ErrorKind::SamplerExhausted: return "SamplerExhausted";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::NonMonotoneMap: return "NonMonotoneMap";
    case ErrorKind::DegeneratePrior: return "DegeneratePrior";
    case ErrorKind::NoiseTooLarge: return "NoiseTooLarge";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::AssumptionAViolated: return "AssumptionAViolated";
    case ErrorKind::SingularKernelMatrix: return "SingularKernelMatrix";
    case ErrorKind::UnsupportedDomain: return "UnsupportedDomain";
    case ErrorKind::RankOutOfRange: return "RankOutOfRange";
    case ErrorKind::ScenarioFormat: return "ScenarioFormat";
  }
  return "Unknown";
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace cdr
