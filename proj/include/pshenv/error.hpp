#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pshenv {

enum class ErrorCode {
    EmptyInterior,
    UnboundedDomain,
    EvaluationError,
    NonLatticeOffset,
    GridMismatch,
    EmptyRegion,
    MissingNeighbor,
    InvalidStencil,
    BracketFailure,
    NonMonotoneRHS,
    MaxIterExceeded,
    OffsetLeavesDomain,
    EmptySet,
    DegenerateFit,
    EmptyInner,
    NonNested,
    ParseError,
    ValidationError,
    IoError,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the toolkit is reported as an Error carrying a code, so
/// callers (and tests) can dispatch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pshenv
