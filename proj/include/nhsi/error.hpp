#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nhsi {

/// Named failure and degradation conditions. Hard failures are thrown as
/// `Error`; soft ones are collected as `Warning` next to the result.
enum class ErrorKind {
    InvalidArgument,
    ZeroPolynomial,
    NonConvergence,
    DegreeZero,
    DegreeDrop,
    AllZeroHops,
    DegenerateModel,
    ZeroBeta,
    TooSmallL,
    TooLargeL,
    QVanishesOnCircle,
    BandTrackingAmbiguous,
    UnmatchedGbzPoint,
    EliminationDegenerate,
    DegreeBudgetExceeded,
    IdenticallyZero,
    OpenCurve,
    OnSpectrum,
    PhaseUnresolved,
    NewtonDivergence,
    ClusterAmbiguous,
    RadiusUnderflow,
    ConfigInvalid,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DegreeZero: return "DegreeZero";
    case ErrorKind::DegreeDrop: return "DegreeDrop";
    case ErrorKind::AllZeroHops: return "AllZeroHops";
    case ErrorKind::DegenerateModel: return "DegenerateModel";
    case ErrorKind::ZeroBeta: return "ZeroBeta";
    case ErrorKind::TooSmallL: return "TooSmallL";
    case ErrorKind::TooLargeL: return "TooLargeL";
    case ErrorKind::QVanishesOnCircle: return "QVanishesOnCircle";
    case ErrorKind::BandTrackingAmbiguous: return "BandTrackingAmbiguous";
    case ErrorKind::UnmatchedGbzPoint: return "UnmatchedGbzPoint";
    case ErrorKind::EliminationDegenerate: return "EliminationDegenerate";
    case ErrorKind::DegreeBudgetExceeded: return "DegreeBudgetExceeded";
    case ErrorKind::IdenticallyZero: return "IdenticallyZero";
    case ErrorKind::OpenCurve: return "OpenCurve";
    case ErrorKind::OnSpectrum: return "OnSpectrum";
    case ErrorKind::PhaseUnresolved: return "PhaseUnresolved";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::ClusterAmbiguous: return "ClusterAmbiguous";
    case ErrorKind::RadiusUnderflow: return "RadiusUnderflow";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

struct Warning {
    ErrorKind kind;
    std::string detail;
};

using Warnings = std::vector<Warning>;

} // namespace nhsi
