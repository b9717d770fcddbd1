#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nagumo {

enum class ErrorKind {
  InvalidArgument,
  NoEquilibria,
  HypothesisH0Violated,
  BelowHomoclinicThreshold,
  OutOfRange,
  NoSolution,
  WeightTooLarge,
  InvalidRegime,
  NotClosedOrbit,
  EnergyOutOfBand,
  NoGap,
  StepFailure,
  CenterSingularity,
  DegenerateCrossing,
  RegimeViolation,
  AnchorOrderViolation,
  InclusionFailure,
  ChartInversionFailure,
  NotFound,
  PolishDiverged,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-readable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nagumo
