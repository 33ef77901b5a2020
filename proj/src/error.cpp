#include "nhse/error.hpp"

namespace nhse {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::LatticeTooSmall: return "LatticeTooSmall";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SolverError: return "SolverError";
    case ErrorCode::AmbiguousSelector: return "AmbiguousSelector";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::NotDegenerate: return "NotDegenerate";
    case ErrorCode::NoIntertwiner: return "NoIntertwiner";
    case ErrorCode::NonIntegerPhase: return "NonIntegerPhase";
    case ErrorCode::TooSingular: return "TooSingular";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorCode::PairingFailure: return "PairingFailure";
    case ErrorCode::PartnerNotFound: return "PartnerNotFound";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace nhse
