#pragma once

#include "childpen/event_distribution.hpp"
#include "childpen/survey_ingest.hpp"

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace childpen {

enum class Outcome { income, hours, full_time_share };
enum class FullTimeRule { any, exactly_40, at_least_40 };
enum class Weighting { pmf_only, population_weighted };
enum class EventBinning { floor, nearest };
enum class TrajectoryGroup { treated, placebo_analytical, placebo_monte_carlo };

std::string_view to_string(Outcome o) noexcept;
std::string_view to_string(FullTimeRule r) noexcept;
std::string_view to_string(Weighting w) noexcept;
std::string_view to_string(EventBinning b) noexcept;
std::string_view to_string(TrajectoryGroup g) noexcept;

inline constexpr double kFullTimeHours = 40.0;

/// Value of an outcome for one respondent; absent when the underlying answer is missing.
std::optional<double> outcome_value(const RespondentRecord& r, Outcome outcome);

/// Subpopulation predicate used by every estimator.
struct Subpopulation {
    std::optional<Gender> gender;
    std::optional<Parenthood> parenthood;
    FullTimeRule full_time = FullTimeRule::any;

    [[nodiscard]] bool matches(const RespondentRecord& r) const;
};

/// Inclusive event-time range in bin units.
struct TauRange {
    long min = -5;
    long max = 15;

    [[nodiscard]] std::size_t size() const noexcept { return std::size_t(max - min + 1); }
    [[nodiscard]] long at(std::size_t i) const noexcept { return min + long(i); }
    [[nodiscard]] bool contains(long tau) const noexcept { return tau >= min && tau <= max; }
};

/// Dense row-major square matrix.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
    [[nodiscard]] double trace() const noexcept;
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Outcome summary of one age bin among a control population.
struct AgeGroupStats {
    long age_bin = 0;
    double mean = 0.0;
    double variance_of_mean = 0.0;  // sample variance / count
    std::size_t count = 0;
};

enum TrajectoryFlag : std::uint32_t {
    kFlagNone = 0,
    kFlagUndefined = 1u << 0,       // no weight at this tau
    kFlagCohortLag = 1u << 1,       // |tau| beyond 10 years: cohort and event effects confounded
    kFlagSingletonBin = 1u << 2,    // a contributing bin holds one respondent (zero variance)
};

std::string flags_to_string(std::uint32_t flags);

struct TrajectoryEstimate {
    TauRange tau;
    BinWidth bin_width = BinWidth::yearly;
    TrajectoryGroup group = TrajectoryGroup::treated;
    std::vector<double> means;         // NaN where undefined
    SquareMatrix covariance;
    std::vector<double> weight_sums;   // sum_t w_t(tau); respondent counts for treated
    std::vector<std::uint32_t> flags;

    [[nodiscard]] bool defined(std::size_t i) const noexcept { return weight_sums[i] > 0 && !std::isnan(means[i]); }
    [[nodiscard]] double std_error(std::size_t i) const { return std::sqrt(covariance(i, i)); }
};

/// Per-bin mean and variance of the mean. Bins are floor(age) in bin units.
/// Throws EmptyPopulation.
std::vector<AgeGroupStats> age_group_stats(std::span<const RespondentRecord> records, Outcome outcome,
                                           const Subpopulation& filter, BinWidth bin_width = BinWidth::yearly);

/// Placebo trajectory as the expected value over all placebo-birth assignments:
/// Z_tau = sum_t w_t(tau) Y_t / sum_t w_t(tau), w_t(tau) = p(t - tau) (pmf_only)
/// or n_t p(t - tau) (population_weighted). Carries the full covariance.
/// Throws NoOverlap.
TrajectoryEstimate analytical_placebo(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf,
                                      TauRange tau, Weighting weighting = Weighting::pmf_only);

/// Cov(Z_tau, Z_tau') = sum_t w_t(tau) w_t(tau') v_t / (W_tau W_tau'). Throws NoOverlap.
SquareMatrix placebo_covariance(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                                Weighting weighting = Weighting::pmf_only);

/// Individual (age bin, outcome) pairs a Monte Carlo run draws placebo births for.
struct PlaceboIndividual {
    long age_bin = 0;
    double value = 0.0;
};

std::vector<PlaceboIndividual> placebo_individuals(std::span<const RespondentRecord> records, Outcome outcome,
                                                   const Subpopulation& filter, BinWidth bin_width);

/// Per-draw trajectory means, draws x taus, NaN where a draw left a tau empty.
struct DrawTable {
    std::size_t draws = 0;
    std::size_t taus = 0;
    std::vector<double> means;

    [[nodiscard]] double at(std::size_t draw, std::size_t tau) const noexcept { return means[draw * taus + tau]; }
};

struct MonteCarloPlacebo {
    TrajectoryEstimate estimate;           // across-draw average; covariance = diag(sd^2 / defined draws)
    std::vector<double> draw_sd;           // across-draw sd per tau (randomization noise)
    std::vector<std::size_t> defined_draws;
    DrawTable per_draw;
};

/// Random placebo assignment: every draw gives each individual an event bin
/// sampled from `pmf`. Stream of draw d derives from (seed, d).
/// Throws NoOverlap.
MonteCarloPlacebo monte_carlo_placebo(std::span<const PlaceboIndividual> individuals, const AgeAtEventPMF& pmf,
                                      TauRange tau, std::size_t draws, std::uint64_t seed);

MonteCarloPlacebo monte_carlo_placebo(std::span<const RespondentRecord> records, Outcome outcome,
                                      const Subpopulation& filter, const AgeAtEventPMF& pmf, TauRange tau,
                                      std::size_t draws, std::uint64_t seed);

/// Reduces a draw table to the across-draw summary (shared by parallel and serial paths).
MonteCarloPlacebo summarize_draws(DrawTable table, TauRange tau, BinWidth bin_width);

/// Event-time trajectory of parents in absolute outcome units.
/// Throws EmptyPopulation.
TrajectoryEstimate parent_trajectory(std::span<const RespondentRecord> records, Outcome outcome, TauRange tau,
                                     const Subpopulation& filter, BinWidth bin_width = BinWidth::yearly,
                                     EventBinning binning = EventBinning::floor);

/// Event-time bin of a fractional event time.
long event_bin(double event_time_years, BinWidth bin_width, EventBinning binning) noexcept;

/// Cohort-lag flag threshold, in years.
inline constexpr double kCohortLagYears = 10.0;

nlohmann::json covariance_to_json(const TrajectoryEstimate& est);

}  // namespace childpen
