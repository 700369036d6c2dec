#pragma once

// Data-parallel kernels behind the estimators. `parallel` is the OpenMP
// implementation used by the library; `reference` is the plain serial
// version kept for testing and benchmarking. Both produce bit-identical
// results for the same inputs.

#include "childpen/counterfactual_gap.hpp"
#include "childpen/placebo_trajectory.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace childpen {

struct ConvolutionResult {
    std::vector<double> means;        // NaN where the weight sum is zero
    std::vector<double> weight_sums;
};

/// Weight of age bin `stat` for event time `tau`.
inline double convolution_weight(const AgeGroupStats& stat, const AgeAtEventPMF& pmf, long tau,
                                 Weighting weighting) noexcept {
    const double p = pmf.mass(stat.age_bin - tau);
    return weighting == Weighting::population_weighted ? p * double(stat.count) : p;
}

namespace parallel {

ConvolutionResult convolve(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                           Weighting weighting);
SquareMatrix convolution_covariance(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                                    Weighting weighting);
DrawTable placebo_draws(std::span<const PlaceboIndividual> individuals, const AgeAtEventPMF& pmf, TauRange tau,
                        std::size_t draws, std::uint64_t seed);
std::vector<GapRound> bootstrap_rounds(std::span<const RespondentRecord> records, const GapSetup& setup,
                                       std::size_t rounds, std::uint64_t seed);

}  // namespace parallel

namespace reference {

ConvolutionResult convolve(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                           Weighting weighting);
SquareMatrix convolution_covariance(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                                    Weighting weighting);
DrawTable placebo_draws(std::span<const PlaceboIndividual> individuals, const AgeAtEventPMF& pmf, TauRange tau,
                        std::size_t draws, std::uint64_t seed);
std::vector<GapRound> bootstrap_rounds(std::span<const RespondentRecord> records, const GapSetup& setup,
                                       std::size_t rounds, std::uint64_t seed);

}  // namespace reference

namespace detail {

/// Z at one event time. Deviations are taken from the first contributing bin
/// mean so a constant outcome comes back unchanged. Writes the weight sum.
double convolve_at(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, long tau, Weighting weighting,
                   double& weight_sum) noexcept;

/// Convolution weights w_t(tau), one row per tau, with each row's nonzero column span.
struct WeightTable {
    std::size_t columns = 0;
    std::vector<double> weights;  // rows x columns
    std::vector<double> totals;
    std::vector<std::size_t> first, last;  // nonzero span [first, last), empty when first == last
    std::vector<double> variances;         // variance_of_mean per column

    [[nodiscard]] const double* row(std::size_t i) const noexcept { return weights.data() + i * columns; }
};

WeightTable make_weight_table(std::span<const AgeGroupStats> stats, std::size_t rows);
/// Fills row `i` of `table`.
void fill_weight_row(WeightTable& table, std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf,
                     TauRange tau, Weighting weighting, std::size_t i) noexcept;
/// Cov(Z_i, Z_k) from a filled table; both rows must carry weight.
double covariance_entry(const WeightTable& table, std::size_t i, std::size_t k) noexcept;

/// Cumulative masses used for inverse-CDF sampling of placebo event bins.
std::vector<double> cumulative(const AgeAtEventPMF& pmf);
/// Event bin for a uniform variate u in [0, 1).
long sample_bin(std::span<const double> cumulative, long a_min, double u) noexcept;

/// One placebo draw: fills `sums`/`counts` (length tau.size()) and writes per-tau means into `row`.
void placebo_draw(std::span<const PlaceboIndividual> individuals, std::span<const double> cumulative, long a_min,
                  TauRange tau, std::uint64_t seed, std::size_t draw, std::span<double> sums,
                  std::span<std::size_t> counts, std::span<double> row);

/// One bootstrap round (resample with replacement, re-estimate both gaps).
GapRound bootstrap_round(std::span<const RespondentRecord> records, const GapSetup& setup, std::uint64_t seed,
                         std::size_t round);

}  // namespace detail

}  // namespace childpen
