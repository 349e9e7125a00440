#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlip {

enum class ErrorKind {
    InvalidParams,
    InvalidConfig,
    OverlappingBalls,
    OffCenterOriginBall,
    NonPositiveRadius,
    NonPositiveCharge,
    OriginSingularity,
    NoThresholdFound,
    BallOutOfBox,
    NegativeNormSquared,
    MassMismatch,
    DegenerateProbe,
    OutOfAnnulus,
    SupportOutOfAnnulus,
    BoxTooSmall,
    Diverged,
    GeometryMismatch,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Domain error; `kind` lets callers (the CLI in particular) branch without
/// parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string const& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Configuration-class errors map to exit code 2 in the CLI, everything
    /// else is a runtime failure.
    bool is_config_error() const noexcept;

private:
    ErrorKind kind_;
};

} // namespace nlip
