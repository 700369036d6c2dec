#include "childpen/dates.hpp"

#include <charconv>
#include <cstdio>

namespace childpen {

namespace chr = std::chrono;

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

chr::sys_days add_years(chr::sys_days base, int years) {
    chr::year_month_day ymd{base};
    chr::year_month_day shifted{ymd.year() + chr::years{years}, ymd.month(), ymd.day()};
    if (!shifted.ok()) {
        // 29 February in a non-leap year
        shifted = chr::year_month_day_last{shifted.year(), chr::month_day_last{shifted.month()}};
    }
    return chr::sys_days{shifted};
}

double forward_years(chr::sys_days from, chr::sys_days to) {
    const int span = int(chr::year_month_day{to}.year()) - int(chr::year_month_day{from}.year());
    int whole = span;
    chr::sys_days anniversary = add_years(from, whole);
    while (anniversary > to) {
        --whole;
        anniversary = add_years(from, whole);
    }
    const chr::sys_days next = add_years(from, whole + 1);
    const double rest = double((to - anniversary).count());
    const double year_len = double((next - anniversary).count());
    return whole + rest / year_len;
}

}  // namespace

chr::sys_days PartialDate::imputed() const {
    return chr::sys_days{chr::year{year} / chr::month{month.value_or(1)} / chr::day{day.value_or(1)}};
}

std::string PartialDate::to_string() const {
    char buf[16];
    if (month && day) {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, *month, *day);
    } else if (month) {
        std::snprintf(buf, sizeof buf, "%04d-%02u", year, *month);
    } else {
        std::snprintf(buf, sizeof buf, "%04d", year);
    }
    return buf;
}

std::optional<PartialDate> parse_date(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.size() != 4 && text.size() != 7 && text.size() != 10) return std::nullopt;

    unsigned year = 0;
    if (!parse_uint(text.substr(0, 4), year)) return std::nullopt;
    PartialDate date{int(year), std::nullopt, std::nullopt};
    if (text.size() >= 7) {
        unsigned month = 0;
        if (text[4] != '-' || !parse_uint(text.substr(5, 2), month) || month < 1 || month > 12) {
            return std::nullopt;
        }
        date.month = month;
    }
    if (text.size() == 10) {
        unsigned day = 0;
        if (text[7] != '-' || !parse_uint(text.substr(8, 2), day)) return std::nullopt;
        if (!chr::year_month_day{chr::year{date.year}, chr::month{*date.month}, chr::day{day}}.ok()) {
            return std::nullopt;
        }
        date.day = day;
    }
    return date;
}

double years_between(chr::sys_days from, chr::sys_days to) {
    if (from == to) return 0.0;
    if (from < to) return forward_years(from, to);
    return -forward_years(to, from);
}

}  // namespace childpen
