#include "blockheat/error.hpp"

namespace blockheat {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_id: return "invalid-id";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::isolated_block: return "isolated-block";
    case ErrorCode::size_mismatch: return "size-mismatch";
    case ErrorCode::time_mismatch: return "time-mismatch";
    case ErrorCode::too_large: return "too-large";
    case ErrorCode::disconnected_mesh: return "disconnected-mesh";
    case ErrorCode::adaptive_failure: return "adaptive-failure";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace blockheat
