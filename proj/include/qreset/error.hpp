#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qreset {

enum class ErrorCode {
    InvalidArgument,
    NonHermitian,
    NegativeTime,
    DivergentTransform,
    QuadratureFailure,
    PoleHit,
    InfiniteMean,
    NotHeavyTailed,
    IntegerExponent,
    InvalidMu,
    ConfluentPoles,
    InversionUnstable,
    CutoffTooSmall,
    BracketInvalid,
    BracketFailure,
    MonotoneFunction,
    NoFiniteOptimum,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// message is prefixed with the code name so CLI output can be grepped.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code)
    {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace qreset
