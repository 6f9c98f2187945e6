#pragma once

#include <stdexcept>
#include <string>

namespace ftj {

enum class ErrorKind {
    OutOfDomain,
    AboveMaximum,
    BranchRangeError,
    DegenerateJump,
    NotConcave,
    BoundaryDatumAboveTheta,
    BoundaryDatumBelowTheta,
    StateEscapedDomain,
    EventCountExceeded,
    NotAdmissible,
    OutsideFanWindow,
    NoForwardCharacteristic,
    HypothesisViolated,
    ConstraintViolated,
    ClaimFailed,
    SearchBudgetExceeded,
    ConfigParseError,
    UnknownSuite,
    InvalidArgument,
};

inline const char* kindName(ErrorKind k) {
    switch (k) {
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::AboveMaximum: return "AboveMaximum";
    case ErrorKind::BranchRangeError: return "BranchRangeError";
    case ErrorKind::DegenerateJump: return "DegenerateJump";
    case ErrorKind::NotConcave: return "NotConcave";
    case ErrorKind::BoundaryDatumAboveTheta: return "BoundaryDatumAboveTheta";
    case ErrorKind::BoundaryDatumBelowTheta: return "BoundaryDatumBelowTheta";
    case ErrorKind::StateEscapedDomain: return "StateEscapedDomain";
    case ErrorKind::EventCountExceeded: return "EventCountExceeded";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::OutsideFanWindow: return "OutsideFanWindow";
    case ErrorKind::NoForwardCharacteristic: return "NoForwardCharacteristic";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::ClaimFailed: return "ClaimFailed";
    case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorKind::ConfigParseError: return "ConfigParseError";
    case ErrorKind::UnknownSuite: return "UnknownSuite";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kindName(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when a boundary-data pair does not produce matching junction fluxes.
class NotAdmissibleError : public Error {
public:
    NotAdmissibleError(double mismatch, double worst_time)
        : Error(ErrorKind::NotAdmissible,
                "flux mismatch " + std::to_string(mismatch) + " at t=" + std::to_string(worst_time)),
          max_mismatch(mismatch), worst_time(worst_time) {}

    double max_mismatch;
    double worst_time;
};

}  // namespace ftj
