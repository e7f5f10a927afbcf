#pragma once

#include <stdexcept>
#include <string>

namespace svident {

enum class ErrorCode {
    InvalidSpec,
    InvalidArgument,
    ZeroPoint,
    PreconditionViolated,
    FullSpan,
    HypothesisUnmet,
    TooLarge,
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroPoint: return "ZeroPoint";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::FullSpan: return "FullSpan";
    case ErrorCode::HypothesisUnmet: return "HypothesisUnmet";
    case ErrorCode::TooLarge: return "TooLarge";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace svident
