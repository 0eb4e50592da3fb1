#pragma once

#include <stdexcept>
#include <string>

namespace stfe {

// Every failure raised by the library derives from Error so callers (the CLI in
// particular) can map families of errors to exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeViolation : Error { using Error::Error; };
struct FeasibilityViolation : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct ExpressionDomainError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct NoiseSpecError : Error { using Error::Error; };
struct ResolutionError : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct ProfileError : Error { using Error::Error; };
struct LinearSolveFailure : Error { using Error::Error; };
struct MissingIncrements : Error { using Error::Error; };
struct AdmissibilityError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

struct BlowupDetected : Error {
    long step;
    BlowupDetected(const std::string& what, long step_index)
        : Error(what), step(step_index) {}
};

}  // namespace stfe
