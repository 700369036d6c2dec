// Serial reference implementations and the per-item helpers both paths share.

#include "childpen/kernels.hpp"
#include "childpen/rng.hpp"

#include <algorithm>
#include <limits>

namespace childpen {

namespace detail {

double convolve_at(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, long tau, Weighting weighting,
                   double& weight_sum) noexcept {
    double ref = 0.0;
    double num = 0.0;
    double den = 0.0;
    bool first = true;
    for (const auto& s : stats) {
        const double w = convolution_weight(s, pmf, tau, weighting);
        if (!(w > 0)) continue;
        if (first) {
            ref = s.mean;
            first = false;
        }
        num += w * (s.mean - ref);
        den += w;
    }
    weight_sum = den;
    return den > 0 ? ref + num / den : std::numeric_limits<double>::quiet_NaN();
}

WeightTable make_weight_table(std::span<const AgeGroupStats> stats, std::size_t rows) {
    const std::size_t columns = stats.size();
    WeightTable t;
    t.columns = columns;
    t.variances.reserve(columns);
    for (const auto& st : stats) t.variances.push_back(st.variance_of_mean);
    t.weights.assign(rows * columns, 0.0);
    t.totals.assign(rows, 0.0);
    t.first.assign(rows, 0);
    t.last.assign(rows, 0);
    return t;
}

void fill_weight_row(WeightTable& table, std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf,
                     TauRange tau, Weighting weighting, std::size_t i) noexcept {
    double* w = table.weights.data() + i * table.columns;
    double total = 0.0;
    std::size_t first = table.columns, last = 0;
    for (std::size_t s = 0; s < stats.size(); ++s) {
        w[s] = convolution_weight(stats[s], pmf, tau.at(i), weighting);
        total += w[s];
        if (w[s] != 0.0) {
            first = std::min(first, s);
            last = s + 1;
        }
    }
    table.totals[i] = total;
    table.first[i] = first < last ? first : 0;
    table.last[i] = last;
}

double covariance_entry(const WeightTable& table, std::size_t i, std::size_t k) noexcept {
    const double* v = table.variances.data();
    const double* wi = table.row(i);
    const double* wk = table.row(k);
    const std::size_t lo = std::max(table.first[i], table.first[k]);
    const std::size_t hi = std::min(table.last[i], table.last[k]);
    // four fixed-order partial sums: deterministic, and short enough dependency chains to pipeline
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t s = lo;
    for (; s + 4 <= hi; s += 4) {
        for (std::size_t j = 0; j < 4; ++j) acc[j] += wi[s + j] * wk[s + j] * v[s + j];
    }
    for (; s < hi; ++s) acc[0] += wi[s] * wk[s] * v[s];
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) / (table.totals[i] * table.totals[k]);
}

std::vector<double> cumulative(const AgeAtEventPMF& pmf) {
    std::vector<double> cum(pmf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf.masses[i];
        cum[i] = acc;
    }
    return cum;
}

long sample_bin(std::span<const double> cumulative, long a_min, double u) noexcept {
    const double target = u * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    std::size_t idx = std::size_t(it - cumulative.begin());
    if (idx >= cumulative.size()) idx = cumulative.size() - 1;
    return a_min + long(idx);
}

void placebo_draw(std::span<const PlaceboIndividual> individuals, std::span<const double> cumulative, long a_min,
                  TauRange tau, std::uint64_t seed, std::size_t draw, std::span<double> sums,
                  std::span<std::size_t> counts, std::span<double> row) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    auto gen = rng::make_stream(seed, draw);
    for (const auto& person : individuals) {
        const long event = sample_bin(cumulative, a_min, rng::uniform01(gen));
        const long t = person.age_bin - event;
        if (!tau.contains(t)) continue;
        const auto j = std::size_t(t - tau.min);
        sums[j] += person.value;
        ++counts[j];
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] = counts[j] > 0 ? sums[j] / double(counts[j]) : std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace detail

namespace reference {

ConvolutionResult convolve(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                           Weighting weighting) {
    ConvolutionResult out;
    out.means.resize(tau.size());
    out.weight_sums.resize(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        out.means[i] = detail::convolve_at(stats, pmf, tau.at(i), weighting, out.weight_sums[i]);
    }
    return out;
}

SquareMatrix convolution_covariance(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                                    Weighting weighting) {
    const std::size_t nt = tau.size();
    auto table = detail::make_weight_table(stats, nt);
    for (std::size_t i = 0; i < nt; ++i) detail::fill_weight_row(table, stats, pmf, tau, weighting, i);
    SquareMatrix cov(nt);
    for (std::size_t i = 0; i < nt; ++i) {
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
    DrawTable table{draws, tau.size(), std::vector<double>(draws * tau.size())};
    std::vector<double> sums(tau.size());
    std::vector<std::size_t> counts(tau.size());
    for (std::size_t d = 0; d < draws; ++d) {
        detail::placebo_draw(individuals, cum, pmf.a_min, tau, seed, d, sums, counts,
                             std::span<double>(table.means).subspan(d * tau.size(), tau.size()));
    }
    return table;
}

std::vector<GapRound> bootstrap_rounds(std::span<const RespondentRecord> records, const GapSetup& setup,
                                       std::size_t rounds, std::uint64_t seed) {
    std::vector<GapRound> out(rounds);
    for (std::size_t r = 0; r < rounds; ++r) out[r] = detail::bootstrap_round(records, setup, seed, r);
    return out;
}

}  // namespace reference

}  // namespace childpen
