#include "nlip/error.hpp"

namespace nlip {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::OverlappingBalls: return "OverlappingBalls";
    case ErrorKind::OffCenterOriginBall: return "OffCenterOriginBall";
    case ErrorKind::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorKind::NonPositiveCharge: return "NonPositiveCharge";
    case ErrorKind::OriginSingularity: return "OriginSingularity";
    case ErrorKind::NoThresholdFound: return "NoThresholdFound";
    case ErrorKind::BallOutOfBox: return "BallOutOfBox";
    case ErrorKind::NegativeNormSquared: return "NegativeNormSquared";
    case ErrorKind::MassMismatch: return "MassMismatch";
    case ErrorKind::DegenerateProbe: return "DegenerateProbe";
    case ErrorKind::OutOfAnnulus: return "OutOfAnnulus";
    case ErrorKind::SupportOutOfAnnulus: return "SupportOutOfAnnulus";
    case ErrorKind::BoxTooSmall: return "BoxTooSmall";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::GeometryMismatch: return "GeometryMismatch";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

bool Error::is_config_error() const noexcept {
    switch (kind_) {
    case ErrorKind::InvalidParams:
    case ErrorKind::InvalidConfig:
    case ErrorKind::OverlappingBalls:
    case ErrorKind::OffCenterOriginBall:
    case ErrorKind::NonPositiveRadius:
    case ErrorKind::NonPositiveCharge:
    case ErrorKind::BallOutOfBox:
    case ErrorKind::GeometryMismatch:
    case ErrorKind::Io:
        return true;
    default:
        return false;
    }
}

} // namespace nlip
