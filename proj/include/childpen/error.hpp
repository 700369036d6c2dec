#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace childpen {

enum class ErrorCode {
    // configuration
    InvalidConfig,
    InvalidSpec,
    // data
    FileNotFound,
    MalformedHeader,
    DuplicateId,
    InvalidBand,
    InvalidHours,
    InvalidEventDate,
    NonPositiveAge,
    EmptyPopulation,
    AllCellsEmpty,
    EmptyGender,
    ZeroHours,
    Io,
    // numerical
    DegenerateSample,
    EmptySupport,
    NoOverlap,
    ZeroReference,
};

/// Exit-code class for an error: 2 config, 3 data, 4 numerical failure.
int exit_code_for(ErrorCode code) noexcept;
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] int exit_code() const noexcept { return exit_code_for(code_); }

private:
    ErrorCode code_;
};

}  // namespace childpen
