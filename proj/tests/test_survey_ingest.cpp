#include "childpen/error.hpp"
#include "childpen/survey_ingest.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace childpen;

namespace {

const char* kHeader =
    "respondent_id,gender,birth_date,interview_date_w1,first_child_birth_date,has_children_w2,"
    "income_exact,income_band,no_income_flag,refused_flag,hours_main_job,hours_additional_jobs\n";

ParsedSurvey parse_text(const std::string& body, const SurveySchema& schema = SurveySchema::identity()) {
    std::istringstream in(kHeader + body);
    return parse_survey(in, schema);
}

RawRespondentRow base_row() {
    RawRespondentRow row;
    row.respondent_id = "r1";
    row.gender = Gender::female;
    row.birth_date = PartialDate{1975, 6, 15};
    row.interview_date_w1 = PartialDate{2010, 6, 15};
    return row;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("parse_survey on a well-formed file") {
    const auto parsed = parse_text(
        "a,female,1980-01-02,2010-06-15,2005-03-01,yes,2345,,0,0,40,5\n"
        "b,male,1975,2010-06-15,,no,,3,0,0,40,\n"
        "c,f,1990-12-31,2010-06-15,,no,,,1,0,,\n");
    REQUIRE(parsed.rows.size() == 3);
    CHECK(parsed.report.rows == 3);
    CHECK(parsed.report.warnings.empty());
    for (const auto& [field, n] : parsed.report.unparseable) CHECK_MESSAGE(n == 0, field);

    const auto& a = parsed.rows[0];
    CHECK(a.gender == Gender::female);
    CHECK(a.income_exact == 2345.0);
    CHECK(a.first_child_birth_date == PartialDate{2005, 3, 1});
    CHECK(a.hours_main_job == 40.0);
    CHECK(a.hours_additional_jobs == 5.0);
    CHECK(parsed.rows[1].income_band == 3);
    CHECK(parsed.rows[1].birth_date == PartialDate{1975, std::nullopt, std::nullopt});
    CHECK(parsed.rows[2].no_income_flag);
    CHECK(parsed.report.missing.at("income_exact") == 2);
}

TEST_CASE("empty income cells stay absent") {
    const auto parsed = parse_text("a,female,1980,2010-06-15,,no,,,,,,\n");
    const auto& row = parsed.rows.at(0);
    CHECK_FALSE(row.income_exact);
    CHECK_FALSE(row.income_band);
    CHECK_FALSE(row.no_income_flag);
    CHECK_FALSE(row.refused_flag);
    CHECK(resolve_income(row, IncomeBandTable::polish_ggs_default()).source == IncomeSource::missing);
}

TEST_CASE("unparseable cells become absent and are counted") {
    const auto parsed = parse_text("a,alien,19x0,2010-06-15,,maybe,12k,x,0,0,forty,\n");
    const auto& row = parsed.rows.at(0);
    CHECK_FALSE(row.gender);
    CHECK_FALSE(row.birth_date);
    CHECK_FALSE(row.income_exact);
    CHECK_FALSE(row.income_band);
    CHECK_FALSE(row.hours_main_job);
    CHECK(row.has_children_w2 == TriState::unknown);
    CHECK(parsed.report.unparseable.at("gender") == 1);
    CHECK(parsed.report.unparseable.at("income_exact") == 1);
    CHECK(parsed.report.unparseable.at("hours_main_job") == 1);
    CHECK(parsed.report.warnings.size() == 6);
}

TEST_CASE("parse errors") {
    CHECK(code_of([] { parse_text("a,female,1980,2010,,no,,,0,0,,\na,male,1981,2010,,no,,,0,0,,\n"); }) ==
          ErrorCode::DuplicateId);
    CHECK(code_of([] {
              std::istringstream in("respondent_id,gender\nx,f\n");
              parse_survey(in, SurveySchema::identity());
          }) == ErrorCode::MalformedHeader);
    CHECK(code_of([] { parse_text("a,female,1980\n"); }) == ErrorCode::MalformedHeader);
    CHECK(code_of([] { parse_survey_file("/nonexistent/survey.csv", SurveySchema::identity()); }) ==
          ErrorCode::FileNotFound);

    SurveySchema incomplete = SurveySchema::identity();
    incomplete.columns.erase("gender");
    CHECK(code_of([&] { parse_text("", incomplete); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("schema maps renamed columns and custom delimiters") {
    SurveySchema schema = SurveySchema::identity(';');
    schema.columns["respondent_id"] = "ARID";
    schema.columns["gender"] = "ASEX";
    std::string header = kHeader;
    for (char& c : header) {
        if (c == ',') c = ';';
    }
    header.replace(0, std::string("respondent_id;gender").size(), "ARID;ASEX");
    std::istringstream in(header + "\"x;1\";2;1980;2010-06-15;;no;1500,5;;0;0;;\n");
    const auto parsed = parse_survey(in, schema);
    REQUIRE(parsed.rows.size() == 1);
    CHECK(parsed.rows[0].respondent_id == "x;1");
    CHECK(parsed.rows[0].gender == Gender::female);
    CHECK_FALSE(parsed.rows[0].income_exact);  // decimal comma is not a number
}

TEST_CASE("income band table") {
    const auto bands = IncomeBandTable::polish_ggs_default();
    CHECK(bands.bands().size() == 13);
    CHECK(bands.midpoint(3) == 1250.0);
    CHECK(bands.midpoint(13) == 10000.0);
    CHECK(code_of([&] { (void)bands.midpoint(14); }) == ErrorCode::InvalidBand);
    CHECK(code_of([&] { (void)bands.midpoint(0); }) == ErrorCode::InvalidBand);

    auto layout = bands.bands();
    layout[4].lower = 1900;  // overlaps band 4
    CHECK(code_of([&] { IncomeBandTable bad(layout); }) == ErrorCode::InvalidConfig);
    layout.pop_back();
    CHECK(code_of([&] { IncomeBandTable bad(layout); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("resolve_income golden fixtures") {
    const auto bands = IncomeBandTable::polish_ggs_default();
    auto row = base_row();

    row.income_exact = 2345;
    auto r = resolve_income(row, bands);
    CHECK(r.income == 2345.0);
    CHECK(r.source == IncomeSource::exact);

    row = base_row();
    row.income_band = 13;
    r = resolve_income(row, bands);
    CHECK(r.income == 10000.0);
    CHECK(r.source == IncomeSource::band_midpoint);

    row.income_band = 3;  // [1000, 1500)
    CHECK(resolve_income(row, bands).income == 1250.0);

    row = base_row();
    row.no_income_flag = true;
    r = resolve_income(row, bands);
    CHECK(r.income == 0.0);
    CHECK(r.source == IncomeSource::zero_imputed);

    row = base_row();
    row.refused_flag = true;
    r = resolve_income(row, bands);
    CHECK_FALSE(r.income);
    CHECK(r.source == IncomeSource::missing);

    row.income_band = 99;
    CHECK(code_of([&] { resolve_income(row, bands); }) == ErrorCode::InvalidBand);
}

TEST_CASE("income resolution priority is total") {
    const auto bands = IncomeBandTable::polish_ggs_default();
    std::mt19937 gen(5);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 500; ++i) {
        auto row = base_row();
        if (coin(gen)) row.income_exact = 1000.0 + i;
        if (coin(gen)) row.income_band = 1 + i % 13;
        row.no_income_flag = coin(gen);
        row.refused_flag = coin(gen);
        const auto r = resolve_income(row, bands);
        if (row.income_exact) {
            CHECK(r.source == IncomeSource::exact);
            CHECK(r.income == row.income_exact);
        } else if (row.income_band) {
            CHECK(r.source == IncomeSource::band_midpoint);
        } else if (row.no_income_flag) {
            CHECK(r.source == IncomeSource::zero_imputed);
            CHECK(resolve_hours(row) == 0.0);
        } else {
            CHECK(r.source == IncomeSource::missing);
        }
        CHECK(resolve_income(row, bands).income == r.income);
    }
}

TEST_CASE("resolve_hours") {
    auto row = base_row();
    row.hours_main_job = 40;
    row.hours_additional_jobs = 5;
    CHECK(resolve_hours(row) == 45.0);
    row.hours_additional_jobs.reset();
    CHECK(resolve_hours(row) == 40.0);
    row.hours_main_job.reset();
    row.hours_additional_jobs = 12;
    CHECK(resolve_hours(row) == 12.0);
    row.hours_additional_jobs.reset();
    CHECK_FALSE(resolve_hours(row));
    row.no_income_flag = true;
    CHECK(resolve_hours(row) == 0.0);

    row = base_row();
    row.hours_main_job = -1;
    CHECK(code_of([&] { resolve_hours(row); }) == ErrorCode::InvalidHours);
}

TEST_CASE("classify_parenthood partitions rows") {
    auto row = base_row();
    row.has_children_w2 = TriState::no;
    CHECK(classify_parenthood(row) == Parenthood::childless);
    row.has_children_w2 = TriState::yes;
    row.first_child_birth_date = PartialDate{2005, 3, 1};
    CHECK(classify_parenthood(row) == Parenthood::parent);
    row.first_child_birth_date.reset();
    CHECK(classify_parenthood(row) == Parenthood::excluded);
    row.has_children_w2 = TriState::unknown;
    row.first_child_birth_date = PartialDate{2005, 3, 1};
    CHECK(classify_parenthood(row) == Parenthood::excluded);
}

TEST_CASE("compute_event_time") {
    auto row = base_row();
    row.has_children_w2 = TriState::yes;
    row.first_child_birth_date = PartialDate{2005, 6, 15};
    CHECK(compute_event_time(row) == 5.0);
    row.first_child_birth_date = PartialDate{2010, 6, 15};
    CHECK(compute_event_time(row) == 0.0);
    row.first_child_birth_date = PartialDate{2012, std::nullopt, std::nullopt};
    CHECK(*compute_event_time(row) == doctest::Approx(-1.55).epsilon(0.005));
    row.first_child_birth_date = PartialDate{2015, 2, 1};
    CHECK(code_of([&] { compute_event_time(row); }) == ErrorCode::InvalidEventDate);
    CHECK(compute_event_time(row, PartialDate{2015, 12, 31}).has_value());
}

TEST_CASE("resolve_respondents honours the record invariants") {
    const auto parsed = parse_text(
        "p,female,1980-01-01,2010-06-15,2005-06-15,yes,2000,,0,0,40,\n"
        "c,male,1970-01-01,2010-06-15,,no,,,1,0,,\n"
        "x,female,1970-01-01,2010-06-15,,yes,,5,0,0,30,\n"
        "u,female,1970-01-01,2010-06-15,,,,5,0,0,30,\n"
        "r,male,1970-01-01,2010-06-15,,no,,,0,1,,\n"
        "nog,,1970-01-01,2010-06-15,,no,,,0,1,,\n"
        "bad,male,1970-01-01,2010-06-15,,no,,17,0,0,,\n"
        "young,female,2000-01-01,2010-06-15,2009-01-01,yes,,,1,0,,\n");
    ParseReport report = parsed.report;
    const auto records = resolve_respondents(parsed.rows, IncomeBandTable::polish_ggs_default(), {}, report);
    REQUIRE(records.size() == 6);
    CHECK(report.dropped_incomplete == 1);
    CHECK(report.dropped_invalid.at("InvalidBand") == 1);
    CHECK(report.event_age_out_of_range == 1);  // "young" had a child at 9
    CHECK(report.parenthood.at("parent") == 2);
    CHECK(report.parenthood.at("childless") == 2);
    CHECK(report.parenthood.at("excluded") == 2);

    for (const auto& r : records) {
        CHECK((r.parenthood == Parenthood::parent) == r.event_time_years.has_value());
        if (r.income_source == IncomeSource::zero_imputed) {
            CHECK(r.income == 0.0);
            CHECK(r.hours_weekly == 0.0);
        }
    }
    CHECK(records[0].event_time_years == 5.0);
    CHECK(records[1].income_source == IncomeSource::zero_imputed);
    CHECK(records[4].income_source == IncomeSource::missing);
    CHECK_FALSE(records[4].income);

    const auto json = report.to_json();
    CHECK(json["resolved"] == 6);
    CHECK(json["income_sources"]["zero_imputed"] == 2);
}

TEST_CASE("canonical table round trip is exact") {
    std::vector<RespondentRecord> records = {
        {"a", Gender::female, 31.123456789012345, Parenthood::parent, -0.3, 1234.5678, 40.0, IncomeSource::exact},
        {"b,with comma", Gender::male, 44.0, Parenthood::childless, std::nullopt, std::nullopt, std::nullopt,
         IncomeSource::missing},
        {"c", Gender::male, 20.0 / 3.0, Parenthood::childless, std::nullopt, 0.0, 0.0, IncomeSource::zero_imputed},
    };
    std::stringstream buf;
    write_respondent_table(buf, records);
    CHECK(read_respondent_table(buf) == records);
}
