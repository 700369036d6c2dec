// OpenMP kernels. Each parallel iteration owns its output slot and derives
// its randomness from (seed, index), so results match the serial reference
// bit for bit under any schedule or thread count.

#include "childpen/kernels.hpp"

#include <limits>

namespace childpen::parallel {

ConvolutionResult convolve(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                           Weighting weighting) {
    const auto nt = static_cast<std::ptrdiff_t>(tau.size());
    ConvolutionResult out;
    out.means.resize(tau.size());
    out.weight_sums.resize(tau.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nt; ++i) {
        out.means[std::size_t(i)] =
            detail::convolve_at(stats, pmf, tau.at(std::size_t(i)), weighting, out.weight_sums[std::size_t(i)]);
    }
    return out;
}

SquareMatrix convolution_covariance(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                                    Weighting weighting) {
    const std::size_t nt = tau.size();
    const auto n = static_cast<std::ptrdiff_t>(nt);
    auto table = detail::make_weight_table(stats, nt);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) detail::fill_weight_row(table, stats, pmf, tau, weighting, std::size_t(i));
    SquareMatrix cov(nt);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
        const auto i = std::size_t(ii);
        if (!(table.totals[i] > 0)) continue;
        for (std::size_t k = i; k < nt; ++k) {
            if (!(table.totals[k] > 0)) continue;
            cov(i, k) = detail::covariance_entry(table, i, k);
            cov(k, i) = cov(i, k);
        }
    }
    return cov;
}

DrawTable placebo_draws(std::span<const PlaceboIndividual> individuals, const AgeAtEventPMF& pmf, TauRange tau,
                        std::size_t draws, std::uint64_t seed) {
    const auto cum = detail::cumulative(pmf);
    const std::size_t nt = tau.size();
    DrawTable table{draws, nt, std::vector<double>(draws * nt)};
    const auto n = static_cast<std::ptrdiff_t>(draws);
#pragma omp parallel
    {
        std::vector<double> sums(nt);
        std::vector<std::size_t> counts(nt);
#pragma omp for schedule(static)
        for (std::ptrdiff_t d = 0; d < n; ++d) {
            detail::placebo_draw(individuals, cum, pmf.a_min, tau, seed, std::size_t(d), sums, counts,
                                 std::span<double>(table.means).subspan(std::size_t(d) * nt, nt));
        }
    }
    return table;
}

std::vector<GapRound> bootstrap_rounds(std::span<const RespondentRecord> records, const GapSetup& setup,
                                       std::size_t rounds, std::uint64_t seed) {
    std::vector<GapRound> out(rounds);
    const auto n = static_cast<std::ptrdiff_t>(rounds);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        out[std::size_t(r)] = detail::bootstrap_round(records, setup, seed, std::size_t(r));
    }
    return out;
}

}  // namespace childpen::parallel
