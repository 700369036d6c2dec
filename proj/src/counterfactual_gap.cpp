#include "childpen/counterfactual_gap.hpp"

#include "childpen/io.hpp"
#include "childpen/kernels.hpp"
#include "childpen/rng.hpp"

#include <cmath>
#include <sstream>

namespace childpen {

namespace {

struct Accumulator {
    double sum = 0.0;
    std::size_t n = 0;
};

std::optional<double> sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return std::nullopt;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / double(xs.size() - 1));
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

GapReport make_report(std::span<const RespondentRecord> records, const GapSetup& setup, std::size_t rounds,
                      const std::vector<GapRound>& results) {
    const auto sample = gap_sample(records, setup.outcome, setup.filter);
    const GapPoint point = evaluate_gap(sample, setup.outcome);

    GapReport report;
    report.outcome = setup.outcome;
    report.observed_mean_f = point.observed_mean_f;
    report.observed_mean_m = point.observed_mean_m;
    report.observed_mean_all = point.observed_mean_all;
    report.counterfactual_mean_f = point.counterfactual_mean_f;
    report.counterfactual_mean_m = point.counterfactual_mean_m;
    report.observed_gap = point.observed_gap;
    report.counterfactual_gap = point.counterfactual_gap;
    report.n = point.n;
    report.excluded_f = point.excluded_f;
    report.excluded_m = point.excluded_m;
    report.rounds = rounds;

    std::vector<double> obs, cf, of, om, cff, cfm;
    for (const auto& r : results) {
        if (!r.ok) {
            ++report.failed_rounds;
            continue;
        }
        obs.push_back(r.observed_gap);
        cf.push_back(r.counterfactual_gap);
        of.push_back(r.observed_f);
        om.push_back(r.observed_m);
        cff.push_back(r.counterfactual_f);
        cfm.push_back(r.counterfactual_m);
    }
    report.bootstrap_sd_observed = sample_sd(obs);
    report.bootstrap_sd_counterfactual = sample_sd(cf);
    report.bootstrap_sd_observed_f = sample_sd(of);
    report.bootstrap_sd_observed_m = sample_sd(om);
    report.bootstrap_sd_counterfactual_f = sample_sd(cff);
    report.bootstrap_sd_counterfactual_m = sample_sd(cfm);
    return report;
}

}  // namespace

std::string_view to_string(GapOutcome o) noexcept { return o == GapOutcome::income ? "income" : "hourly_wage"; }

double hourly_wage(double income_per_month, double hours_per_week) {
    if (!(hours_per_week > 0)) throw Error(ErrorCode::ZeroHours, "hourly wage needs positive hours");
    return income_per_month / (hours_per_week * kWeeksPerMonth);
}

std::optional<double> gap_outcome_value(const RespondentRecord& r, GapOutcome outcome) {
    if (outcome == GapOutcome::income) return r.income;
    if (!r.income || !r.hours_weekly || !(*r.hours_weekly > 0)) return std::nullopt;
    return hourly_wage(*r.income, *r.hours_weekly);
}

int round_age_to_5(double age) noexcept { return 5 * int(std::floor(age / 5.0 + 0.5)); }

std::optional<double> CellMeanModel::coefficient(const CellKey& key) const {
    auto it = coefficients.find(key);
    if (it == coefficients.end()) return std::nullopt;
    return it->second;
}

std::vector<RespondentRecord> gap_sample(std::span<const RespondentRecord> records, GapOutcome outcome,
                                         const Subpopulation& filter) {
    std::vector<RespondentRecord> out;
    for (const auto& r : records) {
        if (r.parenthood == Parenthood::excluded || !filter.matches(r)) continue;
        if (gap_outcome_value(r, outcome)) out.push_back(r);
    }
    return out;
}

CellMeanModel fit_age_cell_model(std::span<const RespondentRecord> records, GapOutcome outcome,
                                 const Subpopulation& filter) {
    std::map<CellKey, Accumulator> cells;
    for (const auto& r : records) {
        if (r.parenthood == Parenthood::excluded || !filter.matches(r)) continue;
        const auto v = gap_outcome_value(r, outcome);
        if (!v) continue;
        auto& acc = cells[{r.gender, r.parenthood == Parenthood::parent, round_age_to_5(r.age_w1)}];
        acc.sum += *v;
        ++acc.n;
    }
    if (cells.empty()) throw Error(ErrorCode::EmptyPopulation, "no respondents for the age-cell model");
    CellMeanModel model;
    for (const auto& [key, acc] : cells) {
        model.coefficients[key] = acc.sum / double(acc.n);
        model.cell_counts[key] = acc.n;
    }
    return model;
}

std::vector<CounterfactualPrediction> predict_counterfactual(const CellMeanModel& model,
                                                             std::span<const RespondentRecord> records) {
    std::vector<CounterfactualPrediction> out;
    out.reserve(records.size());
    bool any = false;
    for (const auto& r : records) {
        if (r.parenthood == Parenthood::excluded) continue;
        CounterfactualPrediction p{r.gender, model.coefficient({r.gender, false, round_age_to_5(r.age_w1)})};
        any = any || p.value.has_value();
        out.push_back(p);
    }
    if (!any) throw Error(ErrorCode::AllCellsEmpty, "no respondent has a non-empty childless reference cell");
    return out;
}

CounterfactualAverage average_counterfactual(std::span<const CounterfactualPrediction> predictions) {
    Accumulator f, m;
    CounterfactualAverage avg;
    for (const auto& p : predictions) {
        const bool female = p.gender == Gender::female;
        if (!p.value) {
            ++(female ? avg.excluded_female : avg.excluded_male);
            continue;
        }
        auto& acc = female ? f : m;
        acc.sum += *p.value;
        ++acc.n;
    }
    if (f.n == 0) throw Error(ErrorCode::EmptyGender, "no female counterfactual predictions");
    if (m.n == 0) throw Error(ErrorCode::EmptyGender, "no male counterfactual predictions");
    avg.female = f.sum / double(f.n);
    avg.male = m.sum / double(m.n);
    avg.n_female = f.n;
    avg.n_male = m.n;
    return avg;
}

double gender_gap(double mean_female, double mean_male) {
    if (mean_male == 0.0) throw Error(ErrorCode::ZeroReference, "male mean is zero");
    return 1.0 - mean_female / mean_male;
}

GapPoint evaluate_gap(std::span<const RespondentRecord> sample, GapOutcome outcome) {
    Accumulator f, m;
    for (const auto& r : sample) {
        const auto v = gap_outcome_value(r, outcome);
        if (!v) continue;
        auto& acc = r.gender == Gender::female ? f : m;
        acc.sum += *v;
        ++acc.n;
    }
    if (f.n == 0) throw Error(ErrorCode::EmptyGender, "no women in the sample");
    if (m.n == 0) throw Error(ErrorCode::EmptyGender, "no men in the sample");

    const CellMeanModel model = fit_age_cell_model(sample, outcome, Subpopulation{});
    const auto predictions = predict_counterfactual(model, sample);
    const CounterfactualAverage cf = average_counterfactual(predictions);

    GapPoint p;
    p.n = f.n + m.n;
    p.observed_mean_f = f.sum / double(f.n);
    p.observed_mean_m = m.sum / double(m.n);
    p.observed_mean_all = (f.sum + m.sum) / double(p.n);
    p.counterfactual_mean_f = cf.female;
    p.counterfactual_mean_m = cf.male;
    p.observed_gap = gender_gap(p.observed_mean_f, p.observed_mean_m);
    p.counterfactual_gap = gender_gap(cf.female, cf.male);
    p.excluded_f = cf.excluded_female;
    p.excluded_m = cf.excluded_male;
    return p;
}

namespace detail {

GapRound bootstrap_round(std::span<const RespondentRecord> records, const GapSetup& setup, std::uint64_t seed,
                         std::size_t round) {
    auto gen = rng::make_stream(seed, round);
    std::vector<RespondentRecord> resample;
    resample.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto pick = std::size_t(rng::uniform01(gen) * double(records.size()));
        resample.push_back(records[pick < records.size() ? pick : records.size() - 1]);
    }
    try {
        const GapPoint p = evaluate_gap(resample, setup.outcome);
        if (p.observed_mean_all == 0.0) return {};
        return {true,
                p.observed_gap,
                p.counterfactual_gap,
                p.observed_mean_f / p.observed_mean_all,
                p.observed_mean_m / p.observed_mean_all,
                p.counterfactual_mean_f / p.observed_mean_all,
                p.counterfactual_mean_m / p.observed_mean_all};
    } catch (const Error&) {
        return {};
    }
}

}  // namespace detail

GapReport bootstrap_gap(std::span<const RespondentRecord> records, const GapSetup& setup, std::size_t rounds,
                        std::uint64_t seed) {
    if (rounds == 0) throw Error(ErrorCode::InvalidConfig, "bootstrap_rounds must be >= 1");
    const auto sample = gap_sample(records, setup.outcome, setup.filter);
    return make_report(sample, GapSetup{setup.outcome, {}}, rounds,
                       parallel::bootstrap_rounds(sample, setup, rounds, seed));
}

GapReport bootstrap_gap_serial(std::span<const RespondentRecord> records, const GapSetup& setup, std::size_t rounds,
                               std::uint64_t seed) {
    if (rounds == 0) throw Error(ErrorCode::InvalidConfig, "bootstrap_rounds must be >= 1");
    const auto sample = gap_sample(records, setup.outcome, setup.filter);
    return make_report(sample, GapSetup{setup.outcome, {}}, rounds,
                       reference::bootstrap_rounds(sample, setup, rounds, seed));
}

nlohmann::json GapReport::to_json() const {
    nlohmann::json j;
    j["outcome"] = to_string(outcome);
    j["observed_mean_f"] = observed_mean_f;
    j["observed_mean_m"] = observed_mean_m;
    j["observed_mean_all"] = observed_mean_all;
    j["counterfactual_mean_f"] = counterfactual_mean_f;
    j["counterfactual_mean_m"] = counterfactual_mean_m;
    j["observed_gap"] = observed_gap;
    j["counterfactual_gap"] = counterfactual_gap;
    j["bootstrap_sd_observed"] = optional_json(bootstrap_sd_observed);
    j["bootstrap_sd_counterfactual"] = optional_json(bootstrap_sd_counterfactual);
    j["rounds"] = rounds;
    j["failed_rounds"] = failed_rounds;
    j["n"] = n;
    j["excluded_no_reference_cell"] = {{"female", excluded_f}, {"male", excluded_m}};
    return j;
}

std::string GapReport::plot_table(char d) const {
    auto num = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string{}; };
    const double base = observed_mean_all;
    std::ostringstream out;
    out << "scenario" << d << "female" << d << "female_sd" << d << "male" << d << "male_sd" << d << "gap" << d
        << "gap_sd\n";
    out << "observed" << d << io::format_double(observed_mean_f / base) << d << num(bootstrap_sd_observed_f) << d
        << io::format_double(observed_mean_m / base) << d << num(bootstrap_sd_observed_m) << d
        << io::format_double(observed_gap) << d << num(bootstrap_sd_observed) << '\n';
    out << "counterfactual" << d << io::format_double(counterfactual_mean_f / base) << d
        << num(bootstrap_sd_counterfactual_f) << d << io::format_double(counterfactual_mean_m / base) << d
        << num(bootstrap_sd_counterfactual_m) << d << io::format_double(counterfactual_gap) << d
        << num(bootstrap_sd_counterfactual) << '\n';
    return out.str();
}

}  // namespace childpen
