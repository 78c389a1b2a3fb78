#include "stripid/error.hpp"

namespace stripid {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptImage: return "CorruptImage";
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::InvalidKernel: return "InvalidKernel";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyPlane: return "EmptyPlane";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::PlaneTooSmall: return "PlaneTooSmall";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MethodMismatch: return "MethodMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::SizeTooLarge: return "SizeTooLarge";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TooManyClasses: return "TooManyClasses";
    case ErrorCode::Io: return "Io";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::CorruptFeatureFile: return "CorruptFeatureFile";
  }
  return "Unknown";
}

}  // namespace stripid
