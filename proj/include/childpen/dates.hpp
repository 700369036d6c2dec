#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace childpen {

/// Calendar date whose month and/or day may be unknown (bare-year survey answers).
struct PartialDate {
    int year = 0;
    std::optional<unsigned> month;
    std::optional<unsigned> day;

    /// Unknown month/day are set to the first month/day of the year.
    [[nodiscard]] std::chrono::sys_days imputed() const;
    [[nodiscard]] bool complete() const noexcept { return month.has_value() && day.has_value(); }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const PartialDate&, const PartialDate&) = default;
};

/// Accepts "YYYY", "YYYY-MM" and "YYYY-MM-DD"; anything else (including
/// impossible calendar dates) yields nullopt.
std::optional<PartialDate> parse_date(std::string_view text);

/// Signed fractional years from `from` to `to`. Whole calendar anniversaries
/// count as exact years; the remainder is days past the last anniversary over
/// the length of that anniversary year. years_between(a, b) == -years_between(b, a).
double years_between(std::chrono::sys_days from, std::chrono::sys_days to);

}  // namespace childpen
