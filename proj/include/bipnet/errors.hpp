#pragma once

#include <stdexcept>
#include <string>

namespace bipnet {

enum class ErrorCode {
  InvalidArgument,
  InvalidPolygon,
  OriginOutside,
  NoIntersection,
  DegenerateShrink,
  EmptyMask,
  TooNarrow,
  DimensionMismatch,
  OutOfBounds,
  CoincidentCenters,
  DegeneratePoints,
  EmptyUnion,
  NonPositiveDistance,
  MalformedLine,
  BadMagic,
  BadVersion,
  Truncated,
  Oversize,
  CannotPlace,
  IoFailure,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bipnet
