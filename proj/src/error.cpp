#include "childpen/error.hpp"

namespace childpen {

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidConfig:
        case ErrorCode::InvalidSpec:
            return 2;
        case ErrorCode::DegenerateSample:
        case ErrorCode::EmptySupport:
        case ErrorCode::NoOverlap:
        case ErrorCode::ZeroReference:
            return 4;
        default:
            return 3;
    }
}

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::InvalidBand: return "InvalidBand";
        case ErrorCode::InvalidHours: return "InvalidHours";
        case ErrorCode::InvalidEventDate: return "InvalidEventDate";
        case ErrorCode::NonPositiveAge: return "NonPositiveAge";
        case ErrorCode::EmptyPopulation: return "EmptyPopulation";
        case ErrorCode::AllCellsEmpty: return "AllCellsEmpty";
        case ErrorCode::EmptyGender: return "EmptyGender";
        case ErrorCode::ZeroHours: return "ZeroHours";
        case ErrorCode::Io: return "Io";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
        case ErrorCode::EmptySupport: return "EmptySupport";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::ZeroReference: return "ZeroReference";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace childpen
