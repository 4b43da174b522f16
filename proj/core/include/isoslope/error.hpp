#pragma once

#include <stdexcept>
#include <string>

namespace isoslope {

enum class ErrorCode {
    IncompatibleProfiles,
    NotAUnit,
    WindowOverflow,
    ExponentLevelExceeded,
    NoSolutionAtLevel,
    PrecisionExhausted,
    NeedsRamification,
    Unstable,
    SlopeOrderViolated,
    TooManySlopes,
    HorizontalityViolated,
    MultiplicityViolation,
    EigenvalueMismatch,
    NotAnEigenvector,
    NotRankOne,
    SingularAtZero,
    NonConvergent,
    EmptyCatalog,
    BoundViolated,
    ParseError,
    InvariantViolation,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
          code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::IncompatibleProfiles: return "IncompatibleProfiles";
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::WindowOverflow: return "WindowOverflow";
    case ErrorCode::ExponentLevelExceeded: return "ExponentLevelExceeded";
    case ErrorCode::NoSolutionAtLevel: return "NoSolutionAtLevel";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::NeedsRamification: return "NeedsRamification";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::SlopeOrderViolated: return "SlopeOrderViolated";
    case ErrorCode::TooManySlopes: return "TooManySlopes";
    case ErrorCode::HorizontalityViolated: return "HorizontalityViolated";
    case ErrorCode::MultiplicityViolation: return "MultiplicityViolation";
    case ErrorCode::EigenvalueMismatch: return "EigenvalueMismatch";
    case ErrorCode::NotAnEigenvector: return "NotAnEigenvector";
    case ErrorCode::NotRankOne: return "NotRankOne";
    case ErrorCode::SingularAtZero: return "SingularAtZero";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "UnknownError";
}

} // namespace isoslope
