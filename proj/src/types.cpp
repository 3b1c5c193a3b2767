#include "acma/types.hpp"

namespace acma {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::invalid_structure: return "InvalidStructure";
    case ErrorCode::degenerate_frame: return "DegenerateFrame";
    case ErrorCode::stencil_out_of_domain: return "StencilOutOfDomain";
    case ErrorCode::not_positive_definite: return "NotPositiveDefinite";
    case ErrorCode::no_contraction: return "NoContraction";
    case ErrorCode::jet_too_long: return "JetTooLong";
    case ErrorCode::disk_escapes_domain: return "DiskEscapesDomain";
    case ErrorCode::empty_domain: return "EmptyDomain";
    case ErrorCode::not_strictly_psh: return "NotStrictlyPsh";
    case ErrorCode::transversality_failure: return "TransversalityFailure";
    case ErrorCode::degenerate_rhs: return "DegenerateRhs";
    case ErrorCode::newton_stalled: return "NewtonStalled";
    case ErrorCode::lost_positivity: return "LostPositivity";
    case ErrorCode::schedule_too_short: return "ScheduleTooShort";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::grid_mismatch: return "GridMismatch";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

}  // namespace acma
