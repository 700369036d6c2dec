#pragma once

#include "childpen/dates.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace childpen {

enum class Gender { female, male };
enum class TriState { yes, no, unknown };
enum class Parenthood { parent, childless, excluded };
enum class IncomeSource { exact, band_midpoint, zero_imputed, missing };

std::string_view to_string(Gender g) noexcept;
std::string_view to_string(Parenthood p) noexcept;
std::string_view to_string(IncomeSource s) noexcept;

std::optional<Gender> parse_gender(std::string_view text);
std::optional<Parenthood> parse_parenthood(std::string_view text);
std::optional<IncomeSource> parse_income_source(std::string_view text);

/// One survey respondent as read from the file, before any resolution.
struct RawRespondentRow {
    std::string respondent_id;
    std::optional<Gender> gender;
    std::optional<PartialDate> birth_date;
    std::optional<PartialDate> interview_date_w1;
    std::optional<PartialDate> first_child_birth_date;
    TriState has_children_w2 = TriState::unknown;
    std::optional<double> income_exact;     // PLN/month, post-tax
    std::optional<long long> income_band;   // 1..13
    bool no_income_flag = false;
    bool refused_flag = false;
    std::optional<double> hours_main_job;
    std::optional<double> hours_additional_jobs;
};

/// Cleaned respondent. Invariants: parent <=> event_time present;
/// zero_imputed => income == 0 and hours == 0.
struct RespondentRecord {
    std::string respondent_id;
    Gender gender = Gender::female;
    double age_w1 = 0.0;
    Parenthood parenthood = Parenthood::excluded;
    std::optional<double> event_time_years;
    std::optional<double> income;
    std::optional<double> hours_weekly;
    IncomeSource income_source = IncomeSource::missing;

    friend bool operator==(const RespondentRecord&, const RespondentRecord&) = default;
};

struct IncomeBand {
    int id = 0;
    double lower = 0.0;
    std::optional<double> upper;  // open top band when absent
};

/// Thirteen ascending, non-overlapping income bands.
class IncomeBandTable {
public:
    static constexpr std::size_t kBandCount = 13;

    /// Throws InvalidConfig when the table is not 13 ascending contiguous-or-gapped bands.
    explicit IncomeBandTable(std::vector<IncomeBand> bands);

    /// Default layout used for the Polish GGS wave-1 questionnaire.
    static IncomeBandTable polish_ggs_default();

    /// Midpoint of a closed band; the open top band maps to its lower bound.
    /// Throws InvalidBand for unknown ids.
    [[nodiscard]] double midpoint(long long band_id) const;
    [[nodiscard]] const std::vector<IncomeBand>& bands() const noexcept { return bands_; }

private:
    std::vector<IncomeBand> bands_;
};

/// Maps logical field names to file column names.
struct SurveySchema {
    char delimiter = ',';
    std::map<std::string, std::string> columns;

    static const std::vector<std::string>& logical_fields();
    /// Every logical field mapped to a column of the same name.
    static SurveySchema identity(char delimiter = ',');
};

struct ParseReport {
    std::size_t rows = 0;
    std::map<std::string, std::size_t> missing;      // empty cell per logical field
    std::map<std::string, std::size_t> unparseable;  // non-empty cell that failed to parse
    std::vector<std::string> warnings;               // capped, first occurrences

    // filled by resolve_respondents
    std::size_t resolved = 0;
    std::size_t dropped_incomplete = 0;
    std::map<std::string, std::size_t> dropped_invalid;  // keyed by error name
    std::map<std::string, std::size_t> income_sources;
    std::map<std::string, std::size_t> parenthood;
    std::size_t event_age_out_of_range = 0;

    void warn(std::string message);
    [[nodiscard]] nlohmann::json to_json() const;
};

struct ParsedSurvey {
    std::vector<RawRespondentRow> rows;
    ParseReport report;
};

/// Throws FileNotFound, MalformedHeader, DuplicateId.
ParsedSurvey parse_survey_file(const std::filesystem::path& path, const SurveySchema& schema);
ParsedSurvey parse_survey(std::istream& in, const SurveySchema& schema);

struct ResolvedIncome {
    std::optional<double> income;
    IncomeSource source = IncomeSource::missing;
};

/// Priority: exact value, then band midpoint, then the no-income flag (zero).
/// Refusals and missing answers stay absent.
ResolvedIncome resolve_income(const RawRespondentRow& row, const IncomeBandTable& bands);

/// Main plus additional job hours; zero when the no-income flag drives income.
std::optional<double> resolve_hours(const RawRespondentRow& row);

Parenthood classify_parenthood(const RawRespondentRow& row);

/// Years from first birth to the wave-1 interview (negative for births after
/// the interview). Absent for rows without a known first-birth date or interview.
/// Throws InvalidEventDate when the birth falls after `wave2_cutoff`.
std::optional<double> compute_event_time(const RawRespondentRow& row,
                                         const PartialDate& wave2_cutoff = {2014, 12, 31});

struct ResolveOptions {
    PartialDate wave2_cutoff{2014, 12, 31};
    double plausible_event_age_min = 12.0;
    double plausible_event_age_max = 60.0;
};

/// Resolves every row. Rows that cannot produce a record (no gender or dates)
/// or that fail a per-row rule are dropped and counted in `report`.
std::vector<RespondentRecord> resolve_respondents(const std::vector<RawRespondentRow>& rows,
                                                  const IncomeBandTable& bands,
                                                  const ResolveOptions& options,
                                                  ParseReport& report);

const std::vector<std::string>& canonical_columns();
void write_respondent_table(std::ostream& out, const std::vector<RespondentRecord>& records,
                            char delimiter = ',');
/// Throws MalformedHeader / DuplicateId / InvalidConfig on a bad canonical table.
std::vector<RespondentRecord> read_respondent_table(std::istream& in, char delimiter = ',');

/// Writes rows in the raw survey layout described by `schema`.
void write_raw_survey(std::ostream& out, const std::vector<RawRespondentRow>& rows,
                      const SurveySchema& schema);

}  // namespace childpen
