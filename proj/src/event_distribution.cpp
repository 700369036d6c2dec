#include "childpen/event_distribution.hpp"

#include "childpen/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace childpen {

namespace {

void check_support(long a_min, long a_max) {
    if (a_min < 1 || a_max < a_min) {
        throw Error(ErrorCode::InvalidConfig, "support: need 1 <= a_min <= a_max, got [" + std::to_string(a_min) +
                                                  ", " + std::to_string(a_max) + "]");
    }
}

// Mass between two ages, taken from whichever tail keeps the subtraction well conditioned.
double interval_mass(const LognormalParams& p, double lo, double hi) {
    const double median = std::exp(p.mu);
    if (lo >= median) return p.survival(lo) - p.survival(hi);
    return p.cdf(hi) - p.cdf(lo);
}

}  // namespace

std::string_view to_string(BinWidth w) noexcept { return w == BinWidth::yearly ? "yearly" : "monthly"; }

long bin_of(double years, BinWidth w) noexcept { return long(std::floor(years * bins_per_year(w))); }

double LognormalParams::implied_sd() const {
    const double s2 = sigma * sigma;
    return std::sqrt(std::expm1(s2)) * std::exp(mu + 0.5 * s2);
}

double LognormalParams::implied_mean() const { return std::exp(mu + 0.5 * sigma * sigma); }

double LognormalParams::cdf(double years) const {
    if (years <= 0) return 0.0;
    return 0.5 * std::erfc(-(std::log(years) - mu) / (sigma * std::numbers::sqrt2));
}

double LognormalParams::survival(double years) const {
    if (years <= 0) return 1.0;
    return 0.5 * std::erfc((std::log(years) - mu) / (sigma * std::numbers::sqrt2));
}

double AgeAtEventPMF::concentration() const noexcept {
    double s = 0.0;
    for (double m : masses) s += m * m;
    return s;
}

nlohmann::json AgeAtEventPMF::to_json() const {
    nlohmann::json j;
    j["bin_width"] = to_string(bin_width);
    j["a_min"] = a_min;
    j["a_max"] = a_max;
    j["bins"] = size();
    nlohmann::json m = nlohmann::json::object();
    for (long a = a_min; a <= a_max; ++a) m[std::to_string(a)] = mass(a);
    j["masses"] = std::move(m);
    return j;
}

AgeAtEventPMF AgeAtEventPMF::from_json(const nlohmann::json& j) {
    try {
        AgeAtEventPMF pmf;
        const std::string width = j.at("bin_width").get<std::string>();
        if (width != "yearly" && width != "monthly") throw Error(ErrorCode::InvalidConfig, "pmf.bin_width: " + width);
        pmf.bin_width = width == "yearly" ? BinWidth::yearly : BinWidth::monthly;
        pmf.a_min = j.at("a_min").get<long>();
        pmf.a_max = j.at("a_max").get<long>();
        check_support(pmf.a_min, pmf.a_max);
        const auto& m = j.at("masses");
        for (long a = pmf.a_min; a <= pmf.a_max; ++a) {
            const double v = m.at(std::to_string(a)).get<double>();
            if (!(v >= 0)) throw Error(ErrorCode::InvalidConfig, "pmf.masses." + std::to_string(a) + ": negative mass");
            pmf.masses.push_back(v);
        }
        return pmf;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("pmf: ") + e.what());
    }
}

LognormalParams fit_lognormal(std::span<const double> ages) {
    if (ages.size() < 2) throw Error(ErrorCode::DegenerateSample, "need at least 2 ages, got " + std::to_string(ages.size()));
    double sum = 0.0;
    for (double a : ages) {
        if (!(a > 0)) throw Error(ErrorCode::NonPositiveAge, "age " + std::to_string(a));
        sum += std::log(a);
    }
    const double n = double(ages.size());
    const double mu = sum / n;
    double ss = 0.0;
    for (double a : ages) {
        const double d = std::log(a) - mu;
        ss += d * d;
    }
    const double sigma = std::sqrt(ss / n);
    if (!(sigma > 0)) throw Error(ErrorCode::DegenerateSample, "all ages equal");
    return {mu, sigma, ages.size()};
}

double support_mass(const LognormalParams& params, BinWidth bin_width, long a_min, long a_max) {
    const double per_year = bins_per_year(bin_width);
    return interval_mass(params, double(a_min) / per_year, double(a_max + 1) / per_year);
}

AgeAtEventPMF discretize_pmf(const LognormalParams& params, BinWidth bin_width, long a_min, long a_max) {
    check_support(a_min, a_max);
    if (!(params.sigma > 0)) throw Error(ErrorCode::InvalidConfig, "lognormal sigma must be positive");
    const double per_year = bins_per_year(bin_width);

    AgeAtEventPMF pmf{bin_width, a_min, a_max, {}};
    pmf.masses.reserve(std::size_t(a_max - a_min + 1));
    double total = 0.0;
    for (long a = a_min; a <= a_max; ++a) {
        const double m = interval_mass(params, double(a) / per_year, double(a + 1) / per_year);
        pmf.masses.push_back(m);
        total += m;
    }
    if (!(total >= 1e-9)) throw Error(ErrorCode::EmptySupport, "support captures mass " + std::to_string(total));
    for (double& m : pmf.masses) m /= total;
    return pmf;
}

AgeAtEventPMF empirical_pmf(std::span<const double> ages, BinWidth bin_width, long a_min, long a_max) {
    check_support(a_min, a_max);
    AgeAtEventPMF pmf{bin_width, a_min, a_max, std::vector<double>(std::size_t(a_max - a_min + 1), 0.0)};
    std::size_t inside = 0;
    for (double age : ages) {
        const long b = bin_of(age, bin_width);
        if (b < a_min || b > a_max) continue;
        pmf.masses[std::size_t(b - a_min)] += 1.0;
        ++inside;
    }
    if (inside == 0) throw Error(ErrorCode::EmptySupport, "no ages inside the support");
    for (double& m : pmf.masses) m /= double(inside);
    return pmf;
}

}  // namespace childpen
