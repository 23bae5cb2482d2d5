#include "core/types.hpp"

namespace vgrasp {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kOutOfImage: return "OutOfImage";
    case ErrorCode::kEmptyRegion: return "EmptyRegion";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kCollinearPalm: return "CollinearPalm";
    case ErrorCode::kZeroLengthSegment: return "ZeroLengthSegment";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kIllConditioned: return "IllConditioned";
    case ErrorCode::kDegenerateRange: return "DegenerateRange";
    case ErrorCode::kClassNotFound: return "ClassNotFound";
    case ErrorCode::kGestureMismatch: return "GestureMismatch";
    case ErrorCode::kTooFewPositions: return "TooFewPositions";
    case ErrorCode::kParallelPlanes: return "ParallelPlanes";
    case ErrorCode::kDegenerateDirection: return "DegenerateDirection";
    case ErrorCode::kNoObjects: return "NoObjects";
    case ErrorCode::kMissingLibraryEntry: return "MissingLibraryEntry";
    case ErrorCode::kUnknownTarget: return "UnknownTarget";
    case ErrorCode::kZeroReferenceVariance: return "ZeroReferenceVariance";
    case ErrorCode::kEmptyTrials: return "EmptyTrials";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace vgrasp
