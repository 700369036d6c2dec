#include "childpen/placebo_trajectory.hpp"

#include "childpen/error.hpp"
#include "childpen/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace childpen {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint32_t lag_flag(long tau, BinWidth w) {
    return std::abs(double(tau) / bins_per_year(w)) > kCohortLagYears ? kFlagCohortLag : kFlagNone;
}

void require_overlap(const std::vector<double>& weight_sums) {
    if (std::none_of(weight_sums.begin(), weight_sums.end(), [](double w) { return w > 0; })) {
        throw Error(ErrorCode::NoOverlap, "no event time in range receives positive weight");
    }
}

}  // namespace

std::string_view to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::income: return "income";
        case Outcome::hours: return "hours";
        case Outcome::full_time_share: return "full_time_share";
    }
    return "income";
}

std::string_view to_string(FullTimeRule r) noexcept {
    switch (r) {
        case FullTimeRule::any: return "any";
        case FullTimeRule::exactly_40: return "exactly_40";
        case FullTimeRule::at_least_40: return "at_least_40";
    }
    return "any";
}

std::string_view to_string(Weighting w) noexcept {
    return w == Weighting::pmf_only ? "pmf_only" : "population_weighted";
}

std::string_view to_string(EventBinning b) noexcept { return b == EventBinning::floor ? "floor" : "nearest"; }

std::string_view to_string(TrajectoryGroup g) noexcept {
    switch (g) {
        case TrajectoryGroup::treated: return "treated";
        case TrajectoryGroup::placebo_analytical: return "placebo_analytical";
        case TrajectoryGroup::placebo_monte_carlo: return "placebo_monte_carlo";
    }
    return "treated";
}

std::optional<double> outcome_value(const RespondentRecord& r, Outcome outcome) {
    switch (outcome) {
        case Outcome::income: return r.income;
        case Outcome::hours: return r.hours_weekly;
        case Outcome::full_time_share:
            if (!r.hours_weekly) return std::nullopt;
            return *r.hours_weekly >= kFullTimeHours ? 1.0 : 0.0;
    }
    return std::nullopt;
}

bool Subpopulation::matches(const RespondentRecord& r) const {
    if (gender && r.gender != *gender) return false;
    if (parenthood && r.parenthood != *parenthood) return false;
    switch (full_time) {
        case FullTimeRule::any: return true;
        case FullTimeRule::exactly_40: return r.hours_weekly && *r.hours_weekly == kFullTimeHours;
        case FullTimeRule::at_least_40: return r.hours_weekly && *r.hours_weekly >= kFullTimeHours;
    }
    return true;
}

double SquareMatrix::trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

std::string flags_to_string(std::uint32_t flags) {
    std::string out;
    auto add = [&](const char* name) {
        if (!out.empty()) out += '|';
        out += name;
    };
    if (flags & kFlagUndefined) add("undefined");
    if (flags & kFlagCohortLag) add("cohort_lag");
    if (flags & kFlagSingletonBin) add("singleton_bin");
    return out;
}

std::vector<AgeGroupStats> age_group_stats(std::span<const RespondentRecord> records, Outcome outcome,
                                           const Subpopulation& filter, BinWidth bin_width) {
    std::map<long, std::vector<double>> by_bin;
    for (const auto& r : records) {
        if (!filter.matches(r)) continue;
        if (auto v = outcome_value(r, outcome)) by_bin[bin_of(r.age_w1, bin_width)].push_back(*v);
    }
    if (by_bin.empty()) throw Error(ErrorCode::EmptyPopulation, "no respondents with outcome " + std::string(to_string(outcome)));

    std::vector<AgeGroupStats> stats;
    stats.reserve(by_bin.size());
    for (const auto& [bin, values] : by_bin) {
        const double n = double(values.size());
        double sum = 0.0;
        for (double v : values) sum += v;
        const double mean = sum / n;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double var_of_mean = values.size() > 1 ? ss / (n - 1) / n : 0.0;
        stats.push_back({bin, mean, var_of_mean, values.size()});
    }
    return stats;
}

TrajectoryEstimate analytical_placebo(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                                      Weighting weighting) {
    ConvolutionResult conv = parallel::convolve(stats, pmf, tau, weighting);
    require_overlap(conv.weight_sums);

    TrajectoryEstimate est;
    est.tau = tau;
    est.bin_width = pmf.bin_width;
    est.group = TrajectoryGroup::placebo_analytical;
    est.covariance = parallel::convolution_covariance(stats, pmf, tau, weighting);
    est.flags.assign(tau.size(), kFlagNone);
    for (std::size_t i = 0; i < tau.size(); ++i) {
        std::uint32_t f = lag_flag(tau.at(i), pmf.bin_width);
        if (!(conv.weight_sums[i] > 0)) f |= kFlagUndefined;
        for (const auto& s : stats) {
            if (s.count == 1 && convolution_weight(s, pmf, tau.at(i), weighting) > 0) {
                f |= kFlagSingletonBin;
                break;
            }
        }
        est.flags[i] = f;
    }
    est.means = std::move(conv.means);
    est.weight_sums = std::move(conv.weight_sums);
    return est;
}

SquareMatrix placebo_covariance(std::span<const AgeGroupStats> stats, const AgeAtEventPMF& pmf, TauRange tau,
                                Weighting weighting) {
    ConvolutionResult conv = parallel::convolve(stats, pmf, tau, weighting);
    require_overlap(conv.weight_sums);
    return parallel::convolution_covariance(stats, pmf, tau, weighting);
}

std::vector<PlaceboIndividual> placebo_individuals(std::span<const RespondentRecord> records, Outcome outcome,
                                                   const Subpopulation& filter, BinWidth bin_width) {
    std::vector<PlaceboIndividual> out;
    for (const auto& r : records) {
        if (!filter.matches(r)) continue;
        if (auto v = outcome_value(r, outcome)) out.push_back({bin_of(r.age_w1, bin_width), *v});
    }
    return out;
}

MonteCarloPlacebo summarize_draws(DrawTable table, TauRange tau, BinWidth bin_width) {
    const std::size_t nt = tau.size();
    MonteCarloPlacebo mc;
    mc.estimate.tau = tau;
    mc.estimate.bin_width = bin_width;
    mc.estimate.group = TrajectoryGroup::placebo_monte_carlo;
    mc.estimate.means.assign(nt, kNaN);
    mc.estimate.weight_sums.assign(nt, 0.0);
    mc.estimate.flags.assign(nt, kFlagNone);
    mc.estimate.covariance = SquareMatrix(nt);
    mc.draw_sd.assign(nt, kNaN);
    mc.defined_draws.assign(nt, 0);

    for (std::size_t j = 0; j < nt; ++j) {
        // accumulate around the first defined draw so identical draws give exactly zero spread
        double shift = kNaN;
        double sum = 0.0;
        std::size_t k = 0;
        for (std::size_t d = 0; d < table.draws; ++d) {
            const double v = table.at(d, j);
            if (std::isnan(v)) continue;
            if (k == 0) shift = v;
            sum += v - shift;
            ++k;
        }
        mc.defined_draws[j] = k;
        mc.estimate.flags[j] = lag_flag(tau.at(j), bin_width);
        if (k == 0) {
            mc.estimate.flags[j] |= kFlagUndefined;
            continue;
        }
        const double offset = sum / double(k);
        double ss = 0.0;
        for (std::size_t d = 0; d < table.draws; ++d) {
            const double v = table.at(d, j);
            if (!std::isnan(v)) ss += (v - shift - offset) * (v - shift - offset);
        }
        mc.estimate.means[j] = shift + offset;
        mc.estimate.weight_sums[j] = double(k) / double(table.draws);
        if (k > 1) {
            const double var = ss / double(k - 1);
            mc.draw_sd[j] = std::sqrt(var);
            mc.estimate.covariance(j, j) = var / double(k);
        } else {
            mc.draw_sd[j] = 0.0;
        }
    }
    if (std::none_of(mc.defined_draws.begin(), mc.defined_draws.end(), [](std::size_t k) { return k > 0; })) {
        throw Error(ErrorCode::NoOverlap, "no draw places any individual inside the event-time range");
    }
    mc.per_draw = std::move(table);
    return mc;
}

MonteCarloPlacebo monte_carlo_placebo(std::span<const PlaceboIndividual> individuals, const AgeAtEventPMF& pmf,
                                      TauRange tau, std::size_t draws, std::uint64_t seed) {
    if (draws == 0) throw Error(ErrorCode::InvalidConfig, "draws must be >= 1");
    return summarize_draws(parallel::placebo_draws(individuals, pmf, tau, draws, seed), tau, pmf.bin_width);
}

MonteCarloPlacebo monte_carlo_placebo(std::span<const RespondentRecord> records, Outcome outcome,
                                      const Subpopulation& filter, const AgeAtEventPMF& pmf, TauRange tau,
                                      std::size_t draws, std::uint64_t seed) {
    const auto individuals = placebo_individuals(records, outcome, filter, pmf.bin_width);
    if (individuals.empty()) throw Error(ErrorCode::EmptyPopulation, "no control respondents with the outcome");
    return monte_carlo_placebo(individuals, pmf, tau, draws, seed);
}

long event_bin(double event_time_years, BinWidth bin_width, EventBinning binning) noexcept {
    const double scaled = event_time_years * bins_per_year(bin_width);
    return binning == EventBinning::floor ? long(std::floor(scaled)) : long(std::floor(scaled + 0.5));
}

TrajectoryEstimate parent_trajectory(std::span<const RespondentRecord> records, Outcome outcome, TauRange tau,
                                     const Subpopulation& filter, BinWidth bin_width, EventBinning binning) {
    const std::size_t nt = tau.size();
    std::vector<std::vector<double>> values(nt);
    std::size_t eligible = 0;
    for (const auto& r : records) {
        if (r.parenthood != Parenthood::parent || !r.event_time_years || !filter.matches(r)) continue;
        const auto v = outcome_value(r, outcome);
        if (!v) continue;
        ++eligible;
        const long b = event_bin(*r.event_time_years, bin_width, binning);
        if (tau.contains(b)) values[std::size_t(b - tau.min)].push_back(*v);
    }
    if (eligible == 0) throw Error(ErrorCode::EmptyPopulation, "no parents with outcome " + std::string(to_string(outcome)));

    TrajectoryEstimate est;
    est.tau = tau;
    est.bin_width = bin_width;
    est.group = TrajectoryGroup::treated;
    est.means.assign(nt, kNaN);
    est.weight_sums.assign(nt, 0.0);
    est.flags.assign(nt, kFlagNone);
    est.covariance = SquareMatrix(nt);
    for (std::size_t j = 0; j < nt; ++j) {
        const auto& v = values[j];
        est.flags[j] = lag_flag(tau.at(j), bin_width);
        if (v.empty()) {
            est.flags[j] |= kFlagUndefined;
            continue;
        }
        const double n = double(v.size());
        double sum = 0.0;
        for (double x : v) sum += x;
        const double mean = sum / n;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        est.means[j] = mean;
        est.weight_sums[j] = n;
        est.covariance(j, j) = v.size() > 1 ? ss / (n - 1) / n : 0.0;
        if (v.size() == 1) est.flags[j] |= kFlagSingletonBin;
    }
    return est;
}

nlohmann::json covariance_to_json(const TrajectoryEstimate& est) {
    nlohmann::json j;
    j["group"] = to_string(est.group);
    j["bin_width"] = to_string(est.bin_width);
    j["tau_min"] = est.tau.min;
    j["tau_max"] = est.tau.max;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < est.covariance.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < est.covariance.size(); ++k) row.push_back(est.covariance(i, k));
        rows.push_back(std::move(row));
    }
    j["covariance"] = std::move(rows);
    return j;
}

}  // namespace childpen
