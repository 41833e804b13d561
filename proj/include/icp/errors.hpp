#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icp {

enum class ErrorKind {
  MissingColumn,
  UnknownColumn,
  NonNumericValue,
  SingleRow,
  InvalidDataset,
  InvalidPartition,
  InvalidCutpoints,
  RankDeficient,
  TooFewRows,
  DomainError,
  EnvironmentTooSmall,
  TooFewSamples,
  InfeasibleConfig,
  TargetIntervened,
  GridTooLarge,
  UnknownFixture,
  MalformedInput,
};

std::string_view to_string(ErrorKind kind);

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
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::NonNumericValue: return "NonNumericValue";
    case ErrorKind::SingleRow: return "SingleRow";
    case ErrorKind::InvalidDataset: return "InvalidDataset";
    case ErrorKind::InvalidPartition: return "InvalidPartition";
    case ErrorKind::InvalidCutpoints: return "InvalidCutpoints";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::TooFewRows: return "TooFewRows";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EnvironmentTooSmall: return "EnvironmentTooSmall";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorKind::TargetIntervened: return "TargetIntervened";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::UnknownFixture: return "UnknownFixture";
    case ErrorKind::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

}  // namespace icp
