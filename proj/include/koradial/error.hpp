#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace koradial {

/// Failure categories raised by the library. The CLI maps some of them to
/// distinct exit codes.
enum class Errc {
  NonPositiveRadius,
  TooFewNodes,
  BadGrading,
  DimensionTooSmall,
  GridMismatch,
  NonPositiveExponent,
  EmptyLattice,
  NegativeWeightValue,
  InvalidProblem,
  ZeroDenominator,
  ZeroInnerIntegral,
  NotStrictlyMonotone,
  BeyondRange,
  BeyondZRange,
  ZRangeExhausted,
  BeyondKORange,
  MonotoneRadiusNotFound,
  Overflow,
  ParseError,
  ValidationError,
  IoError,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NonPositiveRadius: return "NonPositiveRadius";
    case Errc::TooFewNodes: return "TooFewNodes";
    case Errc::BadGrading: return "BadGrading";
    case Errc::DimensionTooSmall: return "DimensionTooSmall";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::NonPositiveExponent: return "NonPositiveExponent";
    case Errc::EmptyLattice: return "EmptyLattice";
    case Errc::NegativeWeightValue: return "NegativeWeightValue";
    case Errc::InvalidProblem: return "InvalidProblem";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::ZeroInnerIntegral: return "ZeroInnerIntegral";
    case Errc::NotStrictlyMonotone: return "NotStrictlyMonotone";
    case Errc::BeyondRange: return "BeyondRange";
    case Errc::BeyondZRange: return "BeyondZRange";
    case Errc::ZRangeExhausted: return "ZRangeExhausted";
    case Errc::BeyondKORange: return "BeyondKORange";
    case Errc::MonotoneRadiusNotFound: return "MonotoneRadiusNotFound";
    case Errc::Overflow: return "Overflow";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  /// Overflow-style errors carry the radius at which the problem appeared.
  Error(Errc code, const std::string& what, double radius)
      : Error(code, what + " (r = " + std::to_string(radius) + ")") {
    radius_ = radius;
  }

  Errc code() const noexcept { return code_; }
  double radius() const noexcept { return radius_; }
  /// Message without the category prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
  double radius_ = std::nan("");
};

}  // namespace koradial
