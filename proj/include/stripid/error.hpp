#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stripid {

enum class ErrorCode {
  FileNotFound,
  UnsupportedFormat,
  CorruptImage,
  InvalidDimensions,
  InvalidKernel,
  InvalidArgument,
  EmptyPlane,
  EmptyVector,
  DegenerateInput,
  PlaneTooSmall,
  LengthMismatch,
  MethodMismatch,
  DimensionMismatch,
  EmptyDataset,
  SingleClass,
  ClassTooSmall,
  SizeTooLarge,
  TooFewSamples,
  TooManyClasses,
  Io,
  VersionMismatch,
  CorruptModel,
  CorruptFeatureFile,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stripid
