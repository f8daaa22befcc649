#include "tpb/error.hpp"

namespace tpb {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::io: return "IoError";
    case ErrorCode::stratum_count_mismatch: return "StratumCountMismatch";
    case ErrorCode::missing_payload: return "MissingPayload";
    case ErrorCode::empty_stratum: return "EmptyStratum";
    case ErrorCode::degenerate_stratum: return "DegenerateStratum";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::collinear: return "Collinear";
    case ErrorCode::singular_jacobian: return "SingularJacobian";
    case ErrorCode::singular_moment: return "SingularMoment";
    case ErrorCode::singular_information: return "SingularInformation";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::no_events: return "NoEvents";
    case ErrorCode::separation_detected: return "SeparationDetected";
    case ErrorCode::variant_requires_weights: return "VariantRequiresWeights";
    case ErrorCode::too_few_replicates: return "TooFewReplicates";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::internal: return "InternalError";
  }
  return "UnknownError";
}

}  // namespace tpb
