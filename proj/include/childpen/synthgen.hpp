#pragma once

#include "childpen/event_distribution.hpp"
#include "childpen/placebo_trajectory.hpp"
#include "childpen/survey_ingest.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace childpen {

struct Knot {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Knot&, const Knot&) = default;
};

/// Piecewise-linear profile held constant beyond the end knots.
double interpolate_clamped(const std::vector<Knot>& knots, double x);
/// Piecewise-linear profile that is zero outside [first knot, last knot].
double interpolate_bounded(const std::vector<Knot>& knots, double x);

/// Synthetic population with known ground truth.
struct PopulationSpec {
    std::size_t n_childless = 2000;
    std::size_t n_parents = 2000;
    double age_min = 18.0;
    double age_max = 65.0;
    double female_share = 0.5;
    /// Optional relative density of age (knots over years); empty means uniform.
    std::vector<Knot> age_density;
    std::vector<Knot> income_profile_female{{18.0, 2000.0}, {65.0, 2000.0}};
    std::vector<Knot> income_profile_male{{18.0, 2000.0}, {65.0, 2000.0}};
    /// Additive effect of parenthood by event time in years (0 outside the knots).
    std::vector<Knot> child_effect_female;
    std::vector<Knot> child_effect_male;
    /// Effects must vanish before this event time.
    double anticipation_onset = -5.0;
    /// Parents whose first birth lies further in the future than this are redrawn (wave-2 window).
    double min_event_time = -4.0;
    double noise_sd = 0.0;
    /// Probability of a 40h week; the rest work 20h.
    double full_time_share_female = 1.0;
    double full_time_share_male = 1.0;
    LognormalParams age_at_birth{3.30, 0.17, 0};
    std::uint64_t seed = 1;

    /// Throws InvalidSpec with the offending field.
    void validate() const;

    [[nodiscard]] nlohmann::json to_json() const;
    static PopulationSpec from_json(const nlohmann::json& j);
};

/// Ground-truth child effect of a parent at event-time bin `tau_bin` (years, floor binning).
double true_child_effect(const PopulationSpec& spec, Gender gender, long tau_year_bin);

/// Wave-1 interview date shared by every synthetic respondent.
inline const PartialDate kSyntheticInterview{2010, 6, 15};

/// Deterministic under spec.seed. Ages and event times are day-quantized so the
/// population survives a round trip through the raw survey format unchanged.
std::vector<RespondentRecord> generate_population(const PopulationSpec& spec);

/// Raw survey rows (dates, exact income, main-job hours) that resolve back to `records`.
std::vector<RawRespondentRow> to_raw_rows(const std::vector<RespondentRecord>& records);

struct ValidationOptions {
    BinWidth bin_width = BinWidth::yearly;
    long support_min_years = 15;
    long support_max_years = 49;
    long tau_min_years = -5;
    long tau_max_years = 15;
    Weighting weighting = Weighting::pmf_only;
    std::uint64_t seed = 1;
};

struct RecoveredEffect {
    long tau = 0;  // bin units
    double recovered = 0.0;
    double truth = 0.0;
    double combined_se = 0.0;
    double z = 0.0;  // (recovered - truth) / combined_se, 0 when both are exact
};

struct ValidationReport {
    std::size_t bins = 0;  // M
    double effective_bins = 0.0;
    // (a) analytical (population weighted) vs Monte Carlo mean
    std::size_t draws = 0;
    double max_abs_z_oracle = 0.0;
    std::vector<double> oracle_z;  // per tau, NaN where undefined
    // (b) recovered child effects
    std::vector<RecoveredEffect> recovered_female;
    std::vector<RecoveredEffect> recovered_male;
    double max_abs_z_recovery = 0.0;
    // (c) randomization-noise reduction
    std::size_t groups = 0;
    std::optional<double> sd_ratio;  // absent when the outcome has no randomization variance
    double sqrt_m = 0.0;
    bool ratio_within_bounds = false;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Checks the analytical estimator against the Monte Carlo oracle, recovers the
/// spec's child effects and measures the noise-reduction ratio. Consumes only
/// public estimator outputs. `rounds` is the number of M-draw groups in (c).
ValidationReport run_validation(const PopulationSpec& spec, std::size_t draws, std::size_t rounds,
                                const ValidationOptions& options = {});

/// Ratio of the single-draw sd to the sd of means of consecutive `group_size`
/// draws, pooled over taus that every draw defines. nullopt when no tau qualifies.
std::optional<double> grouped_sd_ratio(const DrawTable& table, std::size_t group_size);

}  // namespace childpen
