#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sievecox {

enum class ErrorCode {
    EmptySequenceSet,
    InvalidDataset,
    DomainError,
    InsufficientCell,
    NoEndpointData,
    MissingPrior,
    NoEventsForType,
    SingularInformation,
    DegenerateVariance,
    MissingArmData,
    ImpossibleTruncation,
    DegenerateMissingness,
    InvalidConfig,
    IoError,
    Internal,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::EmptySequenceSet: return "EmptySequenceSet";
        case ErrorCode::InvalidDataset: return "InvalidDataset";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::InsufficientCell: return "InsufficientCell";
        case ErrorCode::NoEndpointData: return "NoEndpointData";
        case ErrorCode::MissingPrior: return "MissingPrior";
        case ErrorCode::NoEventsForType: return "NoEventsForType";
        case ErrorCode::SingularInformation: return "SingularInformation";
        case ErrorCode::DegenerateVariance: return "DegenerateVariance";
        case ErrorCode::MissingArmData: return "MissingArmData";
        case ErrorCode::ImpossibleTruncation: return "ImpossibleTruncation";
        case ErrorCode::DegenerateMissingness: return "DegenerateMissingness";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Non-fatal conditions (boundary fits, separation, fallback priors, ...)
// are accumulated as warnings on result objects instead of thrown.
struct Warning {
    std::string tag;
    std::string message;
};

using WarningList = std::vector<Warning>;

}  // namespace sievecox
