#include "wvlab/error.hpp"

namespace wvlab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnsupportedField: return "UnsupportedField";
    case ErrorCode::EmptyCollection: return "EmptyCollection";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::EmptyMeasure: return "EmptyMeasure";
    case ErrorCode::MapRangeError: return "MapRangeError";
    case ErrorCode::SolverStalled: return "SolverStalled";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::NumericalInconsistency: return "NumericalInconsistency";
    case ErrorCode::SphereSamplingFailed: return "SphereSamplingFailed";
    case ErrorCode::SequenceTooClose: return "SequenceTooClose";
    case ErrorCode::NoUsablePairs: return "NoUsablePairs";
    case ErrorCode::InvalidRay: return "InvalidRay";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidMeasure: return "InvalidMeasure";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace wvlab
