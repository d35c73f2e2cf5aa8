#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blockheat {

enum class ErrorCode {
  invalid_argument,
  invalid_dimension,
  invalid_id,
  out_of_range,
  isolated_block,
  size_mismatch,
  time_mismatch,
  too_large,
  disconnected_mesh,
  adaptive_failure,
  divergence,
  degenerate,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type of the library; the code selects the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace blockheat
