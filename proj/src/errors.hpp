#pragma once

#include <stdexcept>
#include <string>

namespace doclab {

// Numeric values line up with the doclab_status codes in include/doclab.h.
enum class ErrorCode : int {
  parse_error = 1,
  schema_error = 2,
  dangling_reference = 3,
  score_range = 4,
  unknown_category = 5,
  range_error = 6,
  io_error = 7,
  mixed_image = 8,
  no_ground_truth = 9,
  empty_dataset = 10,
  shape_mismatch = 11,
  divergence = 12,
  id_collision = 13,
  wrong_image = 14,
  invalid_argument = 15,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace doclab
