#include "fastgm/error.hpp"

namespace fastgm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyVector: return "empty vector";
    case ErrorCode::kInvalidK: return "invalid k";
    case ErrorCode::kInvalidWeight: return "invalid weight";
    case ErrorCode::kInvalidElement: return "invalid element";
    case ErrorCode::kDuplicateElement: return "duplicate element";
    case ErrorCode::kMissingElement: return "missing element";
    case ErrorCode::kExhaustedQueue: return "exhausted queue";
    case ErrorCode::kInconsistentWeight: return "inconsistent weight";
    case ErrorCode::kIncompleteSketch: return "incomplete sketch";
    case ErrorCode::kMismatchedK: return "mismatched k";
    case ErrorCode::kMismatchedScheme: return "mismatched scheme";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kKTooSmall: return "k too small";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kInvalidConfig: return "invalid config";
  }
  return "unknown error";
}

}  // namespace fastgm
