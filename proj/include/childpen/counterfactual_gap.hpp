#pragma once

#include "childpen/error.hpp"
#include "childpen/placebo_trajectory.hpp"
#include "childpen/survey_ingest.hpp"

#include <json.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace childpen {

enum class GapOutcome { income, hourly_wage };
std::string_view to_string(GapOutcome o) noexcept;

/// 52 weeks / 12 months.
inline constexpr double kWeeksPerMonth = 4.33;

/// PLN per hour from monthly income and weekly hours. Throws ZeroHours.
double hourly_wage(double income_per_month, double hours_per_week);

/// Outcome used by the gap pipeline; the wage needs income and positive hours.
std::optional<double> gap_outcome_value(const RespondentRecord& r, GapOutcome outcome);

/// Nearest multiple of 5, ties rounded up (22.5 -> 25).
int round_age_to_5(double age) noexcept;

struct CellKey {
    Gender gender = Gender::female;
    bool child = false;
    int age = 0;  // multiple of 5

    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

/// Saturated regression on (gender, child dummy, rounded age) indicators,
/// i.e. the cell means.
struct CellMeanModel {
    std::map<CellKey, double> coefficients;
    std::map<CellKey, std::size_t> cell_counts;

    [[nodiscard]] std::optional<double> coefficient(const CellKey& key) const;
};

/// Respondents of the filter that carry the outcome and a parent/childless status.
std::vector<RespondentRecord> gap_sample(std::span<const RespondentRecord> records, GapOutcome outcome,
                                         const Subpopulation& filter);

/// Throws EmptyPopulation.
CellMeanModel fit_age_cell_model(std::span<const RespondentRecord> records, GapOutcome outcome,
                                 const Subpopulation& filter);

struct CounterfactualPrediction {
    Gender gender = Gender::female;
    std::optional<double> value;  // absent: the childless reference cell is empty (flagged, excluded)
};

/// Childless-cell prediction of the respondent's own gender and rounded age,
/// for every parent or childless respondent. Throws AllCellsEmpty.
std::vector<CounterfactualPrediction> predict_counterfactual(const CellMeanModel& model,
                                                             std::span<const RespondentRecord> records);

struct CounterfactualAverage {
    double female = 0.0;
    double male = 0.0;
    std::size_t n_female = 0;
    std::size_t n_male = 0;
    std::size_t excluded_female = 0;
    std::size_t excluded_male = 0;
};

/// Mean of the non-excluded predictions per gender. Throws EmptyGender.
CounterfactualAverage average_counterfactual(std::span<const CounterfactualPrediction> predictions);

/// 1 - female / male. Throws ZeroReference.
double gender_gap(double mean_female, double mean_male);

struct GapSetup {
    GapOutcome outcome = GapOutcome::income;
    Subpopulation filter;
};

/// Point estimates on one sample.
struct GapPoint {
    double observed_mean_f = 0.0;
    double observed_mean_m = 0.0;
    double observed_mean_all = 0.0;
    double counterfactual_mean_f = 0.0;
    double counterfactual_mean_m = 0.0;
    double observed_gap = 0.0;
    double counterfactual_gap = 0.0;
    std::size_t n = 0;
    std::size_t excluded_f = 0;
    std::size_t excluded_m = 0;
};

/// Observed and counterfactual gaps on an already-filtered gap sample.
GapPoint evaluate_gap(std::span<const RespondentRecord> sample, GapOutcome outcome);

/// Summary of one bootstrap round; `ok` is false when the round hit an empty cell or gender.
struct GapRound {
    bool ok = false;
    double observed_gap = 0.0;
    double counterfactual_gap = 0.0;
    // means as multiples of the round's observed overall mean
    double observed_f = 0.0;
    double observed_m = 0.0;
    double counterfactual_f = 0.0;
    double counterfactual_m = 0.0;

    friend bool operator==(const GapRound&, const GapRound&) = default;
};

struct GapReport {
    GapOutcome outcome = GapOutcome::income;
    double observed_mean_f = 0.0;
    double observed_mean_m = 0.0;
    double observed_mean_all = 0.0;
    double counterfactual_mean_f = 0.0;
    double counterfactual_mean_m = 0.0;
    double observed_gap = 0.0;
    double counterfactual_gap = 0.0;
    std::optional<double> bootstrap_sd_observed;
    std::optional<double> bootstrap_sd_counterfactual;
    // sd of the means as multiples of the observed overall mean
    std::optional<double> bootstrap_sd_observed_f;
    std::optional<double> bootstrap_sd_observed_m;
    std::optional<double> bootstrap_sd_counterfactual_f;
    std::optional<double> bootstrap_sd_counterfactual_m;
    std::size_t rounds = 0;
    std::size_t failed_rounds = 0;
    std::size_t n = 0;
    std::size_t excluded_f = 0;
    std::size_t excluded_m = 0;

    [[nodiscard]] nlohmann::json to_json() const;
    /// Two rows (observed, counterfactual) of gender means normalized by the
    /// observed overall mean, with bootstrap sds and the gap.
    [[nodiscard]] std::string plot_table(char delimiter = ',') const;
};

inline constexpr std::size_t kDefaultBootstrapRounds = 50;

/// Point estimates from the full sample; spread from i.i.d. resampling of
/// respondents, round r seeded from (seed, r). Throws Error(InvalidConfig) for rounds == 0.
GapReport bootstrap_gap(std::span<const RespondentRecord> records, const GapSetup& setup,
                        std::size_t rounds = kDefaultBootstrapRounds, std::uint64_t seed = 0);

/// Same report computed with the serial reference rounds.
GapReport bootstrap_gap_serial(std::span<const RespondentRecord> records, const GapSetup& setup,
                               std::size_t rounds = kDefaultBootstrapRounds, std::uint64_t seed = 0);

}  // namespace childpen
