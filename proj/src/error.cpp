#include "pshenv/error.hpp"

namespace pshenv {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInterior: return "EmptyInterior";
        case ErrorCode::UnboundedDomain: return "UnboundedDomain";
        case ErrorCode::EvaluationError: return "EvaluationError";
        case ErrorCode::NonLatticeOffset: return "NonLatticeOffset";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::EmptyRegion: return "EmptyRegion";
        case ErrorCode::MissingNeighbor: return "MissingNeighbor";
        case ErrorCode::InvalidStencil: return "InvalidStencil";
        case ErrorCode::BracketFailure: return "BracketFailure";
        case ErrorCode::NonMonotoneRHS: return "NonMonotoneRHS";
        case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
        case ErrorCode::OffsetLeavesDomain: return "OffsetLeavesDomain";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::EmptyInner: return "EmptyInner";
        case ErrorCode::NonNested: return "NonNested";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace pshenv
