#include "adn/error.hpp"

namespace adn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::duplicate_entry: return "DuplicateEntry";
    case ErrorCode::invalid_k: return "InvalidK";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::coordinate_outside_part: return "CoordinateOutsidePart";
    case ErrorCode::unsupported_conjugate: return "UnsupportedConjugate";
    case ErrorCode::inconsistent_shared_vector: return "InconsistentSharedVector";
    case ErrorCode::infinite_conjugate: return "InfiniteConjugate";
    case ErrorCode::inconsistent_snapshots: return "InconsistentSnapshots";
    case ErrorCode::non_positive_curvature: return "NonPositiveCurvature";
    case ErrorCode::degenerate_subproblem: return "DegenerateSubproblem";
    case ErrorCode::missing_constant: return "MissingConstant";
    case ErrorCode::invalid_input: return "InvalidInput";
    case ErrorCode::invalid_budget: return "InvalidBudget";
    case ErrorCode::non_finite_value: return "NonFiniteValue";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::malformed_message: return "MalformedMessage";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::empty_dataset: return "EmptyDataset";
    case ErrorCode::invalid_spec: return "InvalidSpec";
  }
  return "Unknown";
}

}  // namespace adn
