#pragma once

#include <json.hpp>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace childpen {

enum class BinWidth { yearly, monthly };

std::string_view to_string(BinWidth w) noexcept;
/// Number of bins per year of age.
constexpr int bins_per_year(BinWidth w) noexcept { return w == BinWidth::yearly ? 1 : 12; }
/// Index of the bin containing a fractional age (or event time) in years.
long bin_of(double years, BinWidth w) noexcept;

/// Lognormal age at first birth: log(age) ~ Normal(mu, sigma).
struct LognormalParams {
    double mu = 0.0;
    double sigma = 1.0;
    std::size_t n_fit = 0;

    /// Standard deviation of age implied by the fit, in years.
    [[nodiscard]] double implied_sd() const;
    [[nodiscard]] double implied_mean() const;
    /// P(age < x) for x in years.
    [[nodiscard]] double cdf(double years) const;
    /// P(age >= x), evaluated directly to keep precision in the right tail.
    [[nodiscard]] double survival(double years) const;
};

/// Probability mass over contiguous bins [a_min, a_max] (in bin units).
struct AgeAtEventPMF {
    BinWidth bin_width = BinWidth::yearly;
    long a_min = 0;
    long a_max = 0;
    std::vector<double> masses;

    /// Number of bins, M.
    [[nodiscard]] std::size_t size() const noexcept { return masses.size(); }
    /// Mass of bin `a`; zero outside the support.
    [[nodiscard]] double mass(long a) const noexcept {
        return (a < a_min || a > a_max) ? 0.0 : masses[std::size_t(a - a_min)];
    }
    /// Sum of squared masses; 1/this is the effective number of bins.
    [[nodiscard]] double concentration() const noexcept;

    [[nodiscard]] nlohmann::json to_json() const;
    /// Exact inverse of to_json. Throws InvalidConfig on malformed input.
    static AgeAtEventPMF from_json(const nlohmann::json& j);
};

/// Maximum-likelihood fit. Throws NonPositiveAge, DegenerateSample.
LognormalParams fit_lognormal(std::span<const double> ages_at_first_birth);

/// Bin mass = CDF(upper edge) - CDF(lower edge), renormalized over the
/// support. Support bounds are in bin units. Throws EmptySupport.
AgeAtEventPMF discretize_pmf(const LognormalParams& params, BinWidth bin_width, long a_min, long a_max);

/// Un-normalized mass captured by the support; used for the EmptySupport check.
double support_mass(const LognormalParams& params, BinWidth bin_width, long a_min, long a_max);

/// Histogram proportions of the ages falling inside the support. Throws EmptySupport.
AgeAtEventPMF empirical_pmf(std::span<const double> ages_at_first_birth, BinWidth bin_width, long a_min, long a_max);

}  // namespace childpen
