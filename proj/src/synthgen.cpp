#include "childpen/synthgen.hpp"

#include "childpen/error.hpp"
#include "childpen/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace childpen {

namespace chr = std::chrono;

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidSpec, "synth." + field + ": " + what);
}

void check_knots(const std::vector<Knot>& knots, const std::string& field, bool allow_empty) {
    require(allow_empty || !knots.empty(), field, "needs at least one knot");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        require(std::isfinite(knots[i].x) && std::isfinite(knots[i].y), field, "non-finite knot");
        if (i > 0) require(knots[i].x > knots[i - 1].x, field, "knot positions must increase");
    }
}

PartialDate to_partial(chr::sys_days d) {
    const chr::year_month_day ymd{d};
    return {int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day())};
}

// Day `years` before `anchor`, chosen so years_between(day, anchor) reproduces `years` exactly
// when `years` itself came from a day-quantized date.
chr::sys_days day_before(chr::sys_days anchor, double years) {
    const auto guess = std::llround(years * 365.25);
    for (long long delta : {0LL, -1LL, 1LL, -2LL, 2LL, -3LL, 3LL}) {
        const chr::sys_days day = anchor - chr::days{guess + delta};
        if (years_between(day, anchor) == years) return day;
    }
    return anchor - chr::days{guess};
}

double quantize_years(chr::sys_days anchor, double years) {
    return years_between(anchor - chr::days{std::llround(years * 365.25)}, anchor);
}

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

nlohmann::json knots_json(const std::vector<Knot>& knots) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& k : knots) a.push_back({k.x, k.y});
    return a;
}

std::vector<Knot> knots_from(const nlohmann::json& j) {
    std::vector<Knot> out;
    for (const auto& k : j) out.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
    return out;
}

std::vector<double> ages_at_birth(const std::vector<RespondentRecord>& pop, std::optional<Gender> gender) {
    std::vector<double> ages;
    for (const auto& r : pop) {
        if (r.parenthood != Parenthood::parent || (gender && r.gender != *gender)) continue;
        ages.push_back(r.age_w1 - *r.event_time_years);
    }
    return ages;
}

}  // namespace

double interpolate_clamped(const std::vector<Knot>& knots, double x) {
    if (knots.empty()) return 0.0;
    if (x <= knots.front().x) return knots.front().y;
    if (x >= knots.back().x) return knots.back().y;
    auto hi = std::upper_bound(knots.begin(), knots.end(), x, [](double v, const Knot& k) { return v < k.x; });
    auto lo = hi - 1;
    const double t = (x - lo->x) / (hi->x - lo->x);
    return lo->y + t * (hi->y - lo->y);
}

double interpolate_bounded(const std::vector<Knot>& knots, double x) {
    if (knots.empty() || x < knots.front().x || x > knots.back().x) return 0.0;
    return interpolate_clamped(knots, x);
}

void PopulationSpec::validate() const {
    require(n_childless + n_parents > 0, "n_childless", "population is empty");
    require(age_min > 0 && age_max > age_min, "age_min", "need 0 < age_min < age_max");
    require(female_share >= 0 && female_share <= 1, "female_share", "must lie in [0, 1]");
    check_knots(age_density, "age_density", true);
    for (const auto& k : age_density) require(k.y >= 0, "age_density", "negative density");
    if (!age_density.empty()) {
        require(std::any_of(age_density.begin(), age_density.end(), [](const Knot& k) { return k.y > 0; }),
                "age_density", "density is zero everywhere");
    }
    for (const auto& [profile, field] : {std::pair{&income_profile_female, "income_profile_female"},
                                         std::pair{&income_profile_male, "income_profile_male"}}) {
        check_knots(*profile, field, false);
        require(profile->front().x <= age_min && profile->back().x >= age_max, field,
                "knots must span [age_min, age_max]");
    }
    check_knots(child_effect_female, "child_effect_female", true);
    check_knots(child_effect_male, "child_effect_male", true);
    require(std::isfinite(anticipation_onset), "anticipation_onset", "must be finite");
    for (const auto& [effect, field] : {std::pair{&child_effect_female, "child_effect_female"},
                                        std::pair{&child_effect_male, "child_effect_male"}}) {
        if (effect->empty()) continue;
        // effects are applied per integer event-time bin
        for (double t = std::ceil(effect->front().x); t < anticipation_onset; t += 1.0) {
            require(interpolate_bounded(*effect, t) == 0.0, field, "effect must be zero before anticipation_onset");
        }
    }
    require(min_event_time >= -4.5 && min_event_time <= 0, "min_event_time", "must lie in [-4.5, 0]");
    require(noise_sd >= 0 && std::isfinite(noise_sd), "noise_sd", "must be >= 0");
    require(full_time_share_female >= 0 && full_time_share_female <= 1, "full_time_share_female", "must lie in [0, 1]");
    require(full_time_share_male >= 0 && full_time_share_male <= 1, "full_time_share_male", "must lie in [0, 1]");
    require(age_at_birth.sigma > 0 && std::isfinite(age_at_birth.mu), "birth_sigma", "lognormal needs sigma > 0");
}

nlohmann::json PopulationSpec::to_json() const {
    return {
        {"n_childless", n_childless},
        {"n_parents", n_parents},
        {"age_min", age_min},
        {"age_max", age_max},
        {"female_share", female_share},
        {"age_density", knots_json(age_density)},
        {"income_profile_female", knots_json(income_profile_female)},
        {"income_profile_male", knots_json(income_profile_male)},
        {"child_effect_female", knots_json(child_effect_female)},
        {"child_effect_male", knots_json(child_effect_male)},
        {"anticipation_onset", anticipation_onset},
        {"min_event_time", min_event_time},
        {"noise_sd", noise_sd},
        {"full_time_share_female", full_time_share_female},
        {"full_time_share_male", full_time_share_male},
        {"birth_mu", age_at_birth.mu},
        {"birth_sigma", age_at_birth.sigma},
        {"seed", seed},
    };
}

PopulationSpec PopulationSpec::from_json(const nlohmann::json& j) {
    PopulationSpec s;
    try {
        s.n_childless = j.value("n_childless", s.n_childless);
        s.n_parents = j.value("n_parents", s.n_parents);
        s.age_min = j.value("age_min", s.age_min);
        s.age_max = j.value("age_max", s.age_max);
        s.female_share = j.value("female_share", s.female_share);
        if (j.contains("age_density")) s.age_density = knots_from(j.at("age_density"));
        if (j.contains("income_profile_female")) s.income_profile_female = knots_from(j.at("income_profile_female"));
        if (j.contains("income_profile_male")) s.income_profile_male = knots_from(j.at("income_profile_male"));
        if (j.contains("child_effect_female")) s.child_effect_female = knots_from(j.at("child_effect_female"));
        if (j.contains("child_effect_male")) s.child_effect_male = knots_from(j.at("child_effect_male"));
        s.anticipation_onset = j.value("anticipation_onset", s.anticipation_onset);
        s.min_event_time = j.value("min_event_time", s.min_event_time);
        s.noise_sd = j.value("noise_sd", s.noise_sd);
        s.full_time_share_female = j.value("full_time_share_female", s.full_time_share_female);
        s.full_time_share_male = j.value("full_time_share_male", s.full_time_share_male);
        s.age_at_birth.mu = j.value("birth_mu", s.age_at_birth.mu);
        s.age_at_birth.sigma = j.value("birth_sigma", s.age_at_birth.sigma);
        s.seed = j.value("seed", s.seed);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, std::string("synth: ") + e.what());
    }
    s.validate();
    return s;
}

double true_child_effect(const PopulationSpec& spec, Gender gender, long tau_year_bin) {
    const auto& knots = gender == Gender::female ? spec.child_effect_female : spec.child_effect_male;
    return interpolate_bounded(knots, double(tau_year_bin));
}

std::vector<RespondentRecord> generate_population(const PopulationSpec& spec) {
    spec.validate();
    auto gen = rng::make_stream(spec.seed, 0);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::normal_distribution<double> log_birth(spec.age_at_birth.mu, spec.age_at_birth.sigma);
    const chr::sys_days interview = kSyntheticInterview.imputed();

    double density_max = 0.0;
    for (const auto& k : spec.age_density) density_max = std::max(density_max, k.y);
    auto draw_age = [&] {
        for (;;) {
            const double age = spec.age_min + rng::uniform01(gen) * (spec.age_max - spec.age_min);
            if (spec.age_density.empty()) return age;
            if (rng::uniform01(gen) * density_max < interpolate_clamped(spec.age_density, age)) return age;
        }
    };

    std::vector<RespondentRecord> pop;
    pop.reserve(spec.n_childless + spec.n_parents);
    const std::size_t total = spec.n_childless + spec.n_parents;
    for (std::size_t i = 0; i < total; ++i) {
        const bool parent = i >= spec.n_childless;
        RespondentRecord r;
        char id[32];
        std::snprintf(id, sizeof id, "%s%07zu", parent ? "p" : "c", parent ? i - spec.n_childless : i);
        r.respondent_id = id;
        r.gender = rng::uniform01(gen) < spec.female_share ? Gender::female : Gender::male;
        r.age_w1 = quantize_years(interview, draw_age());
        r.parenthood = parent ? Parenthood::parent : Parenthood::childless;

        const auto& profile = r.gender == Gender::female ? spec.income_profile_female : spec.income_profile_male;
        double income = interpolate_clamped(profile, r.age_w1);
        if (parent) {
            double event_time = 0.0;
            int attempts = 0;
            do {
                if (++attempts > 10000) {
                    throw Error(ErrorCode::InvalidSpec, "synth: age range incompatible with age-at-birth distribution");
                }
                event_time = quantize_years(interview, r.age_w1 - std::exp(log_birth(gen)));
            } while (event_time < spec.min_event_time);
            r.event_time_years = event_time;
            income += true_child_effect(spec, r.gender, long(std::floor(event_time)));
        }
        const double eps = noise(gen);
        if (spec.noise_sd > 0) income += spec.noise_sd * eps;
        const double ft_share = r.gender == Gender::female ? spec.full_time_share_female : spec.full_time_share_male;
        r.hours_weekly = rng::uniform01(gen) < ft_share ? 40.0 : 20.0;
        r.income = income;
        r.income_source = IncomeSource::exact;
        pop.push_back(std::move(r));
    }
    return pop;
}

std::vector<RawRespondentRow> to_raw_rows(const std::vector<RespondentRecord>& records) {
    const chr::sys_days interview = kSyntheticInterview.imputed();
    std::vector<RawRespondentRow> rows;
    rows.reserve(records.size());
    for (const auto& r : records) {
        RawRespondentRow row;
        row.respondent_id = r.respondent_id;
        row.gender = r.gender;
        row.birth_date = to_partial(day_before(interview, r.age_w1));
        row.interview_date_w1 = kSyntheticInterview;
        switch (r.parenthood) {
            case Parenthood::parent:
                row.has_children_w2 = TriState::yes;
                row.first_child_birth_date = to_partial(day_before(interview, *r.event_time_years));
                break;
            case Parenthood::childless: row.has_children_w2 = TriState::no; break;
            case Parenthood::excluded: row.has_children_w2 = TriState::unknown; break;
        }
        switch (r.income_source) {
            case IncomeSource::exact: row.income_exact = r.income; break;
            case IncomeSource::zero_imputed: row.no_income_flag = true; break;
            case IncomeSource::band_midpoint: row.income_exact = r.income; break;
            case IncomeSource::missing: row.refused_flag = true; break;
        }
        if (r.income_source != IncomeSource::zero_imputed) row.hours_main_job = r.hours_weekly;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::optional<double> grouped_sd_ratio(const DrawTable& table, std::size_t group_size) {
    if (group_size == 0) return std::nullopt;
    const std::size_t groups = table.draws / group_size;
    if (groups < 2) return std::nullopt;
    const std::size_t used = groups * group_size;

    double var_single = 0.0;
    double var_group = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < table.taus; ++j) {
        bool complete = true;
        for (std::size_t d = 0; d < used && complete; ++d) complete = !std::isnan(table.at(d, j));
        if (!complete) continue;
        any = true;
        double mean = 0.0;
        for (std::size_t d = 0; d < used; ++d) mean += table.at(d, j);
        mean /= double(used);
        double ss = 0.0;
        for (std::size_t d = 0; d < used; ++d) ss += (table.at(d, j) - mean) * (table.at(d, j) - mean);
        var_single += ss / double(used - 1);

        double gss = 0.0;
        for (std::size_t g = 0; g < groups; ++g) {
            double gm = 0.0;
            for (std::size_t d = g * group_size; d < (g + 1) * group_size; ++d) gm += table.at(d, j);
            gm /= double(group_size);
            gss += (gm - mean) * (gm - mean);
        }
        var_group += gss / double(groups - 1);
    }
    if (!any || !(var_group > 0)) return std::nullopt;
    return std::sqrt(var_single / var_group);
}

ValidationReport run_validation(const PopulationSpec& spec, std::size_t draws, std::size_t rounds,
                                const ValidationOptions& options) {
    if (draws < 100) throw Error(ErrorCode::InvalidConfig, "validate.draws must be >= 100");
    if (rounds < 2) throw Error(ErrorCode::InvalidConfig, "validate.rounds must be >= 2");

    const auto pop = generate_population(spec);
    const BinWidth bw = options.bin_width;
    const long per_year = bins_per_year(bw);
    const long a_min = options.support_min_years * per_year;
    const long a_max = (options.support_max_years + 1) * per_year - 1;
    const TauRange tau{options.tau_min_years * per_year, (options.tau_max_years + 1) * per_year - 1};

    const auto pooled_ages = ages_at_birth(pop, std::nullopt);
    const AgeAtEventPMF pooled_pmf = discretize_pmf(fit_lognormal(pooled_ages), bw, a_min, a_max);

    ValidationReport report;
    report.bins = pooled_pmf.size();
    report.effective_bins = 1.0 / pooled_pmf.concentration();
    report.sqrt_m = std::sqrt(double(report.bins));
    report.draws = draws;
    report.groups = rounds;

    // (a) oracle equivalence on the whole childless population
    const Subpopulation childless{std::nullopt, Parenthood::childless, FullTimeRule::any};
    const auto stats = age_group_stats(pop, Outcome::income, childless, bw);
    const auto analytic = analytical_placebo(stats, pooled_pmf, tau, Weighting::population_weighted);
    const auto individuals = placebo_individuals(pop, Outcome::income, childless, bw);
    const auto mc = monte_carlo_placebo(individuals, pooled_pmf, tau, draws, rng::stream_seed(options.seed, 1));
    report.oracle_z.assign(tau.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < tau.size(); ++j) {
        if (!analytic.defined(j) || !mc.estimate.defined(j)) continue;
        const double diff = std::abs(analytic.means[j] - mc.estimate.means[j]);
        const double se = mc.estimate.std_error(j);
        const double z = se > 0 ? diff / se : (diff <= 1e-9 * std::max(1.0, std::abs(analytic.means[j])) ? 0.0 : INFINITY);
        report.oracle_z[j] = z;
        report.max_abs_z_oracle = std::max(report.max_abs_z_oracle, z);
    }

    // (b) child-effect recovery per gender
    for (Gender g : {Gender::female, Gender::male}) {
        auto& out = g == Gender::female ? report.recovered_female : report.recovered_male;
        const auto ages = ages_at_birth(pop, g);
        if (ages.size() < 2) continue;
        const AgeAtEventPMF pmf = discretize_pmf(fit_lognormal(ages), bw, a_min, a_max);
        const auto parents = parent_trajectory(pop, Outcome::income, tau, Subpopulation{g, Parenthood::parent}, bw);
        const auto gstats = age_group_stats(pop, Outcome::income, Subpopulation{g, Parenthood::childless}, bw);
        const auto placebo = analytical_placebo(gstats, pmf, tau, options.weighting);
        for (std::size_t j = 0; j < tau.size(); ++j) {
            if (!parents.defined(j) || !placebo.defined(j)) continue;
            RecoveredEffect e;
            e.tau = tau.at(j);
            e.recovered = parents.means[j] - placebo.means[j];
            e.truth = true_child_effect(spec, g, floor_div(e.tau, per_year));
            e.combined_se = std::sqrt(parents.covariance(j, j) + placebo.covariance(j, j));
            const double diff = e.recovered - e.truth;
            if (e.combined_se > 0) {
                e.z = diff / e.combined_se;
            } else {
                e.z = std::abs(diff) <= 1e-9 * std::max(1.0, std::abs(e.truth)) ? 0.0 : INFINITY;
            }
            report.max_abs_z_recovery = std::max(report.max_abs_z_recovery, std::abs(e.z));
            out.push_back(e);
        }
    }

    // (c) single-draw randomization sd vs sd of M-draw averages
    const auto mc_groups = monte_carlo_placebo(individuals, pooled_pmf, tau, rounds * report.bins,
                                               rng::stream_seed(options.seed, 2));
    report.sd_ratio = grouped_sd_ratio(mc_groups.per_draw, report.bins);
    report.ratio_within_bounds =
        report.sd_ratio && *report.sd_ratio >= report.sqrt_m / 2 && *report.sd_ratio <= 2 * report.sqrt_m;
    return report;
}

nlohmann::json ValidationReport::to_json() const {
    auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
    auto effects = [&](const std::vector<RecoveredEffect>& es) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& e : es) {
            a.push_back({{"tau", e.tau},
                         {"recovered", e.recovered},
                         {"truth", e.truth},
                         {"combined_se", e.combined_se},
                         {"z", finite_or_null(e.z)}});
        }
        return a;
    };
    nlohmann::json z = nlohmann::json::array();
    for (double v : oracle_z) z.push_back(finite_or_null(v));
    return {
        {"bins", bins},
        {"effective_bins", effective_bins},
        {"oracle", {{"draws", draws}, {"max_abs_z", finite_or_null(max_abs_z_oracle)}, {"z", z}}},
        {"recovery",
         {{"female", effects(recovered_female)},
          {"male", effects(recovered_male)},
          {"max_abs_z", finite_or_null(max_abs_z_recovery)}}},
        {"noise_reduction",
         {{"groups", groups},
          {"sd_ratio", sd_ratio ? nlohmann::json(*sd_ratio) : nlohmann::json()},
          {"sqrt_m", sqrt_m},
          {"lower", sqrt_m / 2},
          {"upper", 2 * sqrt_m},
          {"within_bounds", ratio_within_bounds}}},
    };
}

}  // namespace childpen
