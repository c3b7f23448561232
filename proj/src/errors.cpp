#include "errors.hpp"

namespace doclab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::schema_error: return "SchemaError";
    case ErrorCode::dangling_reference: return "DanglingReference";
    case ErrorCode::score_range: return "ScoreRange";
    case ErrorCode::unknown_category: return "UnknownCategory";
    case ErrorCode::range_error: return "RangeError";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::mixed_image: return "MixedImage";
    case ErrorCode::no_ground_truth: return "NoGroundTruth";
    case ErrorCode::empty_dataset: return "EmptyDataset";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::divergence: return "Divergence";
    case ErrorCode::id_collision: return "IdCollision";
    case ErrorCode::wrong_image: return "WrongImage";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

void raise(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(error_code_name(code)) + ": " + message);
}

}  // namespace doclab
