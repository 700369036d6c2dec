#include "childpen/survey_ingest.hpp"

#include "childpen/error.hpp"
#include "childpen/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace childpen {

namespace {

constexpr std::size_t kMaxWarnings = 200;

std::string lower(std::string_view text) {
    std::string out = io::trim(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return out;
}

std::optional<bool> parse_bool(std::string_view text) {
    const std::string t = lower(text);
    if (t == "1" || t == "yes" || t == "y" || t == "true" || t == "t") return true;
    if (t == "0" || t == "no" || t == "n" || t == "false" || t == "f") return false;
    return std::nullopt;
}

std::string optional_number(const std::optional<double>& v) {
    return v ? io::format_double(*v) : std::string{};
}

}  // namespace

std::string_view to_string(Gender g) noexcept { return g == Gender::female ? "female" : "male"; }

std::string_view to_string(Parenthood p) noexcept {
    switch (p) {
        case Parenthood::parent: return "parent";
        case Parenthood::childless: return "childless";
        case Parenthood::excluded: return "excluded";
    }
    return "excluded";
}

std::string_view to_string(IncomeSource s) noexcept {
    switch (s) {
        case IncomeSource::exact: return "exact";
        case IncomeSource::band_midpoint: return "band_midpoint";
        case IncomeSource::zero_imputed: return "zero_imputed";
        case IncomeSource::missing: return "missing";
    }
    return "missing";
}

// GGS codes sex as 1 = male, 2 = female.
std::optional<Gender> parse_gender(std::string_view text) {
    const std::string t = lower(text);
    if (t == "female" || t == "f" || t == "woman" || t == "2") return Gender::female;
    if (t == "male" || t == "m" || t == "man" || t == "1") return Gender::male;
    return std::nullopt;
}

std::optional<Parenthood> parse_parenthood(std::string_view text) {
    const std::string t = lower(text);
    if (t == "parent") return Parenthood::parent;
    if (t == "childless") return Parenthood::childless;
    if (t == "excluded") return Parenthood::excluded;
    return std::nullopt;
}

std::optional<IncomeSource> parse_income_source(std::string_view text) {
    const std::string t = lower(text);
    if (t == "exact") return IncomeSource::exact;
    if (t == "band_midpoint") return IncomeSource::band_midpoint;
    if (t == "zero_imputed") return IncomeSource::zero_imputed;
    if (t == "missing") return IncomeSource::missing;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Income bands

IncomeBandTable::IncomeBandTable(std::vector<IncomeBand> bands) : bands_(std::move(bands)) {
    if (bands_.size() != kBandCount) {
        throw Error(ErrorCode::InvalidConfig, "bands: expected 13 income bands, got " + std::to_string(bands_.size()));
    }
    std::sort(bands_.begin(), bands_.end(), [](const IncomeBand& a, const IncomeBand& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < bands_.size(); ++i) {
        const IncomeBand& b = bands_[i];
        const std::string where = "bands." + std::to_string(b.id);
        if (b.id != int(i) + 1) throw Error(ErrorCode::InvalidConfig, "bands: ids must be 1..13");
        if (b.lower < 0) throw Error(ErrorCode::InvalidConfig, where + ": negative lower bound");
        if (b.upper && *b.upper <= b.lower) throw Error(ErrorCode::InvalidConfig, where + ": upper bound must exceed lower bound");
        if (!b.upper && i + 1 != bands_.size()) throw Error(ErrorCode::InvalidConfig, where + ": only the top band may be open");
        if (i > 0 && bands_[i - 1].upper && b.lower < *bands_[i - 1].upper) {
            throw Error(ErrorCode::InvalidConfig, where + ": overlaps the previous band");
        }
    }
}

IncomeBandTable IncomeBandTable::polish_ggs_default() {
    return IncomeBandTable({
        {1, 0, 500},       {2, 500, 1000},    {3, 1000, 1500},   {4, 1500, 2000},
        {5, 2000, 2500},   {6, 2500, 3000},   {7, 3000, 4000},   {8, 4000, 5000},
        {9, 5000, 6000},   {10, 6000, 7000},  {11, 7000, 8500},  {12, 8500, 10000},
        {13, 10000, std::nullopt},
    });
}

double IncomeBandTable::midpoint(long long band_id) const {
    if (band_id < 1 || band_id > static_cast<long long>(bands_.size())) {
        throw Error(ErrorCode::InvalidBand, "income band " + std::to_string(band_id) + " outside 1..13");
    }
    const IncomeBand& b = bands_[std::size_t(band_id - 1)];
    if (!b.upper) return b.lower;
    return 0.5 * (b.lower + *b.upper);
}

// ---------------------------------------------------------------------------
// Schema and parse report

const std::vector<std::string>& SurveySchema::logical_fields() {
    static const std::vector<std::string> fields = {
        "respondent_id",  "gender",         "birth_date",     "interview_date_w1",
        "first_child_birth_date", "has_children_w2", "income_exact", "income_band",
        "no_income_flag", "refused_flag",   "hours_main_job", "hours_additional_jobs",
    };
    return fields;
}

SurveySchema SurveySchema::identity(char delimiter) {
    SurveySchema schema;
    schema.delimiter = delimiter;
    for (const auto& f : logical_fields()) schema.columns[f] = f;
    return schema;
}

void ParseReport::warn(std::string message) {
    if (warnings.size() < kMaxWarnings) warnings.push_back(std::move(message));
}

nlohmann::json ParseReport::to_json() const {
    nlohmann::json j;
    j["rows"] = rows;
    j["missing"] = missing;
    j["unparseable"] = unparseable;
    j["warnings"] = warnings;
    j["resolved"] = resolved;
    j["dropped_incomplete"] = dropped_incomplete;
    j["dropped_invalid"] = dropped_invalid;
    j["income_sources"] = income_sources;
    j["parenthood"] = parenthood;
    j["event_age_out_of_range"] = event_age_out_of_range;
    return j;
}

// ---------------------------------------------------------------------------
// Parsing

ParsedSurvey parse_survey_file(const std::filesystem::path& path, const SurveySchema& schema) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, path.string());
    return parse_survey(in, schema);
}

ParsedSurvey parse_survey(std::istream& in, const SurveySchema& schema) {
    for (const auto& field : SurveySchema::logical_fields()) {
        if (!schema.columns.contains(field)) {
            throw Error(ErrorCode::InvalidConfig, "schema." + field + ": no column mapped");
        }
    }

    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::MalformedHeader, "empty file");
    const auto header = io::split_record(line, schema.delimiter);
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = io::trim(header[i]);
        if (name.empty()) throw Error(ErrorCode::MalformedHeader, "empty column name at position " + std::to_string(i + 1));
        if (!position.emplace(name, i).second) throw Error(ErrorCode::MalformedHeader, "repeated column '" + name + "'");
    }
    std::unordered_map<std::string, std::size_t> column_of;
    for (const auto& [field, column] : schema.columns) {
        auto it = position.find(column);
        if (it == position.end()) {
            throw Error(ErrorCode::MalformedHeader, "column '" + column + "' (for " + field + ") not in header");
        }
        column_of[field] = it->second;
    }

    ParsedSurvey result;
    ParseReport& report = result.report;
    for (const auto& field : SurveySchema::logical_fields()) {
        report.missing[field] = 0;
        report.unparseable[field] = 0;
    }
    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;

    while (std::getline(in, line)) {
        ++line_no;
        if (io::trim(line).empty()) continue;
        const auto cells = io::split_record(line, schema.delimiter);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::MalformedHeader, "line " + std::to_string(line_no) + ": expected " +
                                                       std::to_string(header.size()) + " fields, got " +
                                                       std::to_string(cells.size()));
        }
        auto cell = [&](const std::string& field) { return io::trim(cells[column_of.at(field)]); };

        // Returns the cell when non-empty, counting misses.
        auto present = [&](const std::string& field) -> std::optional<std::string> {
            std::string v = cell(field);
            if (v.empty()) {
                ++report.missing[field];
                return std::nullopt;
            }
            return v;
        };
        auto bad = [&](const std::string& field, const std::string& value) {
            ++report.unparseable[field];
            report.warn("line " + std::to_string(line_no) + ": " + field + " '" + value + "' unparseable");
        };

        RawRespondentRow row;
        row.respondent_id = cell("respondent_id");
        if (row.respondent_id.empty()) {
            ++report.missing["respondent_id"];
            row.respondent_id = "line" + std::to_string(line_no);
            report.warn("line " + std::to_string(line_no) + ": empty respondent_id, using " + row.respondent_id);
        }
        if (!seen.insert(row.respondent_id).second) {
            throw Error(ErrorCode::DuplicateId, "respondent_id '" + row.respondent_id + "' (line " +
                                                    std::to_string(line_no) + ")");
        }

        if (auto v = present("gender")) {
            row.gender = parse_gender(*v);
            if (!row.gender) bad("gender", *v);
        }
        for (auto [field, target] : {std::pair{"birth_date", &row.birth_date},
                                     std::pair{"interview_date_w1", &row.interview_date_w1},
                                     std::pair{"first_child_birth_date", &row.first_child_birth_date}}) {
            if (auto v = present(field)) {
                *target = parse_date(*v);
                if (!*target) bad(field, *v);
            }
        }
        if (auto v = present("has_children_w2")) {
            if (auto b = parse_bool(*v)) {
                row.has_children_w2 = *b ? TriState::yes : TriState::no;
            } else if (lower(*v) != "unknown") {
                bad("has_children_w2", *v);
            }
        }
        if (auto v = present("income_exact")) {
            row.income_exact = io::parse_double(*v);
            if (!row.income_exact) bad("income_exact", *v);
        }
        if (auto v = present("income_band")) {
            row.income_band = io::parse_int(*v);
            if (!row.income_band) bad("income_band", *v);
        }
        for (auto [field, target] : {std::pair{"no_income_flag", &row.no_income_flag},
                                     std::pair{"refused_flag", &row.refused_flag}}) {
            if (auto v = present(field)) {
                auto b = parse_bool(*v);
                if (!b) bad(field, *v);
                *target = b.value_or(false);
            }
        }
        for (auto [field, target] : {std::pair{"hours_main_job", &row.hours_main_job},
                                     std::pair{"hours_additional_jobs", &row.hours_additional_jobs}}) {
            if (auto v = present(field)) {
                *target = io::parse_double(*v);
                if (!*target) bad(field, *v);
            }
        }
        result.rows.push_back(std::move(row));
    }
    report.rows = result.rows.size();
    return result;
}

// ---------------------------------------------------------------------------
// Resolution rules

ResolvedIncome resolve_income(const RawRespondentRow& row, const IncomeBandTable& bands) {
    if (row.income_exact) return {*row.income_exact, IncomeSource::exact};
    if (row.income_band) return {bands.midpoint(*row.income_band), IncomeSource::band_midpoint};
    if (row.no_income_flag) return {0.0, IncomeSource::zero_imputed};
    return {std::nullopt, IncomeSource::missing};
}

std::optional<double> resolve_hours(const RawRespondentRow& row) {
    for (const auto& h : {row.hours_main_job, row.hours_additional_jobs}) {
        if (h && *h < 0) throw Error(ErrorCode::InvalidHours, "negative hours for '" + row.respondent_id + "'");
    }
    if (row.no_income_flag && !row.income_exact && !row.income_band) return 0.0;
    if (row.hours_main_job && row.hours_additional_jobs) return *row.hours_main_job + *row.hours_additional_jobs;
    if (row.hours_main_job) return row.hours_main_job;
    return row.hours_additional_jobs;
}

Parenthood classify_parenthood(const RawRespondentRow& row) {
    if (row.has_children_w2 == TriState::no) return Parenthood::childless;
    if (row.has_children_w2 == TriState::unknown) return Parenthood::excluded;
    return row.first_child_birth_date ? Parenthood::parent : Parenthood::excluded;
}

std::optional<double> compute_event_time(const RawRespondentRow& row, const PartialDate& wave2_cutoff) {
    if (!row.first_child_birth_date || !row.interview_date_w1) return std::nullopt;
    const auto birth = row.first_child_birth_date->imputed();
    if (birth > wave2_cutoff.imputed()) {
        throw Error(ErrorCode::InvalidEventDate, "first birth " + row.first_child_birth_date->to_string() +
                                                     " after wave-2 cutoff for '" + row.respondent_id + "'");
    }
    return years_between(birth, row.interview_date_w1->imputed());
}

std::vector<RespondentRecord> resolve_respondents(const std::vector<RawRespondentRow>& rows,
                                                  const IncomeBandTable& bands,
                                                  const ResolveOptions& options,
                                                  ParseReport& report) {
    std::vector<RespondentRecord> records;
    records.reserve(rows.size());
    for (const auto& row : rows) {
        if (!row.gender || !row.birth_date || !row.interview_date_w1) {
            ++report.dropped_incomplete;
            continue;
        }
        try {
            RespondentRecord rec;
            rec.respondent_id = row.respondent_id;
            rec.gender = *row.gender;
            rec.age_w1 = years_between(row.birth_date->imputed(), row.interview_date_w1->imputed());
            if (rec.age_w1 <= 0) {
                throw Error(ErrorCode::InvalidEventDate, "birth date not before interview for '" + row.respondent_id + "'");
            }
            const ResolvedIncome income = resolve_income(row, bands);
            rec.income = income.income;
            rec.income_source = income.source;
            rec.hours_weekly = resolve_hours(row);
            rec.parenthood = classify_parenthood(row);
            if (rec.parenthood == Parenthood::parent) {
                rec.event_time_years = compute_event_time(row, options.wave2_cutoff);
                const double event_age = rec.age_w1 - *rec.event_time_years;
                if (event_age < options.plausible_event_age_min || event_age > options.plausible_event_age_max) {
                    ++report.event_age_out_of_range;
                    report.warn("respondent '" + row.respondent_id + "': age at first birth " +
                                io::format_double(event_age) + " outside plausible range");
                }
            }
            ++report.income_sources[std::string(to_string(rec.income_source))];
            ++report.parenthood[std::string(to_string(rec.parenthood))];
            records.push_back(std::move(rec));
        } catch (const Error& e) {
            ++report.dropped_invalid[std::string(to_string(e.code()))];
            report.warn(e.what());
        }
    }
    report.resolved = records.size();
    return records;
}

// ---------------------------------------------------------------------------
// Canonical and raw tables

const std::vector<std::string>& canonical_columns() {
    static const std::vector<std::string> columns = {
        "respondent_id", "gender", "age_w1", "parenthood", "event_time_years", "income", "hours_weekly", "income_source",
    };
    return columns;
}

void write_respondent_table(std::ostream& out, const std::vector<RespondentRecord>& records, char delimiter) {
    const auto& cols = canonical_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? std::string(1, delimiter) : "") << cols[i];
    out << '\n';
    for (const auto& r : records) {
        out << io::quote_field(r.respondent_id, delimiter) << delimiter << to_string(r.gender) << delimiter
            << io::format_double(r.age_w1) << delimiter << to_string(r.parenthood) << delimiter
            << optional_number(r.event_time_years) << delimiter << optional_number(r.income) << delimiter
            << optional_number(r.hours_weekly) << delimiter << to_string(r.income_source) << '\n';
    }
}

std::vector<RespondentRecord> read_respondent_table(std::istream& in, char delimiter) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::MalformedHeader, "empty respondent table");
    auto header = io::split_record(line, delimiter);
    for (auto& h : header) h = io::trim(h);
    if (header != canonical_columns()) throw Error(ErrorCode::MalformedHeader, "not a canonical respondent table");

    std::vector<RespondentRecord> records;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (io::trim(line).empty()) continue;
        const auto c = io::split_record(line, delimiter);
        const std::string where = "line " + std::to_string(line_no);
        if (c.size() != header.size()) throw Error(ErrorCode::MalformedHeader, where + ": wrong field count");
        RespondentRecord r;
        r.respondent_id = c[0];
        if (!seen.insert(r.respondent_id).second) throw Error(ErrorCode::DuplicateId, "respondent_id '" + r.respondent_id + "'");
        auto gender = parse_gender(c[1]);
        auto age = io::parse_double(c[2]);
        auto parenthood = parse_parenthood(c[3]);
        auto source = parse_income_source(c[7]);
        if (!gender || !age || !parenthood || !source) throw Error(ErrorCode::MalformedHeader, where + ": unparseable record");
        r.gender = *gender;
        r.age_w1 = *age;
        r.parenthood = *parenthood;
        r.event_time_years = io::parse_double(c[4]);
        r.income = io::parse_double(c[5]);
        r.hours_weekly = io::parse_double(c[6]);
        r.income_source = *source;
        if ((r.parenthood == Parenthood::parent) != r.event_time_years.has_value()) {
            throw Error(ErrorCode::MalformedHeader, where + ": event_time must be present exactly for parents");
        }
        records.push_back(std::move(r));
    }
    return records;
}

void write_raw_survey(std::ostream& out, const std::vector<RawRespondentRow>& rows, const SurveySchema& schema) {
    const auto& fields = SurveySchema::logical_fields();
    const char d = schema.delimiter;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << d;
        out << io::quote_field(schema.columns.at(fields[i]), d);
    }
    out << '\n';
    auto date = [](const std::optional<PartialDate>& v) { return v ? v->to_string() : std::string{}; };
    for (const auto& r : rows) {
        const char* children = r.has_children_w2 == TriState::yes ? "yes" : r.has_children_w2 == TriState::no ? "no" : "";
        out << io::quote_field(r.respondent_id, d) << d << (r.gender ? to_string(*r.gender) : "") << d
            << date(r.birth_date) << d << date(r.interview_date_w1) << d << date(r.first_child_birth_date) << d
            << children << d << optional_number(r.income_exact) << d
            << (r.income_band ? std::to_string(*r.income_band) : std::string{}) << d
            << (r.no_income_flag ? "1" : "0") << d << (r.refused_flag ? "1" : "0") << d
            << optional_number(r.hours_main_job) << d << optional_number(r.hours_additional_jobs) << '\n';
    }
}

}  // namespace childpen
