#include "childpen/commands.hpp"

#include "childpen/error.hpp"
#include "childpen/io.hpp"
#include "childpen/rng.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unordered_set>

#ifndef CHILDPEN_VERSION
#define CHILDPEN_VERSION "dev"
#endif

namespace childpen {

namespace fs = std::filesystem;

namespace {

// Stream indices carved out of the top-level seed.
constexpr std::uint64_t kSynthStream = 100;
constexpr std::uint64_t kMonteCarloStream = 200;
constexpr std::uint64_t kBootstrapStream = 300;
constexpr std::uint64_t kValidateStream = 400;

/// Collects outputs of one command and writes its manifest last.
class OutputSet {
public:
    OutputSet(const RunConfig& config, std::string command)
        : config_(config), command_(std::move(command)), dir_(config.output_dir) {}

    void write(const std::string& name, const std::string& contents) {
        const fs::path path = dir_ / name;
        io::write_file_atomic(path, contents);
        outputs_[name] = io::sha256_hex(contents);
        paths_.push_back(path);
    }

    CommandResult finish() {
        const ConfigMap map = to_map(config_);
        const std::string echo = to_ini(map);
        const std::string config_name = command_ + "_config.ini";
        write(config_name, echo);

        nlohmann::json inputs = nlohmann::json::object();
        for (const auto& in : config_.inputs) {
            if (fs::exists(in)) inputs[in] = io::sha256_file(in);
        }
        if (config_.pmf_file) inputs[*config_.pmf_file] = io::sha256_file(*config_.pmf_file);

        nlohmann::json manifest;
        manifest["command"] = command_;
        manifest["tool_version"] = CHILDPEN_VERSION;
        manifest["config_hash"] = io::sha256_hex(echo);
        manifest["config"] = map;
        manifest["inputs"] = inputs;
        manifest["outputs"] = outputs_;
        manifest["generated_at"] = timestamp();
        const std::string text = manifest.dump(2) + "\n";
        const fs::path path = dir_ / ("manifest_" + command_ + ".json");
        io::write_file_atomic(path, text);
        paths_.push_back(path);
        return {paths_, manifest};
    }

private:
    static std::string timestamp() {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    const RunConfig& config_;
    std::string command_;
    fs::path dir_;
    nlohmann::json outputs_ = nlohmann::json::object();
    std::vector<fs::path> paths_;
};

void require_inputs(const RunConfig& config) {
    if (config.inputs.empty()) throw Error(ErrorCode::InvalidConfig, "input: no input file given");
}

std::vector<double> ages_at_first_birth(const std::vector<RespondentRecord>& records, std::optional<Gender> gender) {
    std::vector<double> ages;
    for (const auto& r : records) {
        if (r.parenthood != Parenthood::parent || !r.event_time_years) continue;
        if (gender && r.gender != *gender) continue;
        ages.push_back(r.age_w1 - *r.event_time_years);
    }
    return ages;
}

AgeAtEventPMF build_pmf(const RunConfig& c, const std::vector<double>& ages) {
    if (c.pmf_mode == PmfMode::empirical) return empirical_pmf(ages, c.bin_width, c.support_min_bins(), c.support_max_bins());
    return discretize_pmf(fit_lognormal(ages), c.bin_width, c.support_min_bins(), c.support_max_bins());
}

AgeAtEventPMF pmf_for(const RunConfig& c, const std::vector<RespondentRecord>& records, Gender g) {
    if (c.pmf_file) {
        AgeAtEventPMF pmf = AgeAtEventPMF::from_json(nlohmann::json::parse(io::read_file(*c.pmf_file)));
        if (pmf.bin_width != c.bin_width) throw Error(ErrorCode::InvalidConfig, "pmf_file: bin width differs from bin_width");
        return pmf;
    }
    return build_pmf(c, ages_at_first_birth(records, c.pmf_pool == PmfPool::pooled ? std::nullopt : std::optional(g)));
}

std::string trajectory_rows(const TrajectoryEstimate& est, const std::string& group, char d) {
    std::ostringstream out;
    const double per_year = bins_per_year(est.bin_width);
    for (std::size_t i = 0; i < est.tau.size(); ++i) {
        const bool ok = est.defined(i);
        out << est.tau.at(i) << d << io::format_double(double(est.tau.at(i)) / per_year) << d
            << (ok ? io::format_double(est.means[i]) : "") << d << (ok ? io::format_double(est.std_error(i)) : "") << d
            << io::format_double(est.weight_sums[i]) << d << group << d << flags_to_string(est.flags[i]) << '\n';
    }
    return out.str();
}

}  // namespace

const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols = {"tau", "tau_years", "mean", "std_error", "weight_sum", "group", "flags"};
    return cols;
}

nlohmann::json manifest_without_timestamp(nlohmann::json manifest) {
    manifest.erase("generated_at");
    return manifest;
}

std::vector<RespondentRecord> load_records(const RunConfig& config, ParseReport* report) {
    require_inputs(config);
    std::vector<RespondentRecord> records;
    ParseReport local;
    ParseReport& rep = report ? *report : local;
    for (const auto& path : config.inputs) {
        if (!fs::exists(path)) throw Error(ErrorCode::FileNotFound, path);
        if (config.input_format == "canonical") {
            std::ifstream in(path);
            auto part = read_respondent_table(in, config.schema.delimiter);
            rep.rows += part.size();
            rep.resolved += part.size();
            records.insert(records.end(), part.begin(), part.end());
        } else {
            ParsedSurvey parsed = parse_survey_file(path, config.schema);
            rep.rows += parsed.report.rows;
            for (const auto& [k, v] : parsed.report.missing) rep.missing[k] += v;
            for (const auto& [k, v] : parsed.report.unparseable) rep.unparseable[k] += v;
            for (auto& w : parsed.report.warnings) rep.warn(path + ": " + w);
            ResolveOptions options;
            options.wave2_cutoff = config.wave2_cutoff;
            const std::size_t before = rep.resolved;
            auto part = resolve_respondents(parsed.rows, config.bands, options, rep);
            rep.resolved = before + part.size();
            records.insert(records.end(), part.begin(), part.end());
        }
    }
    std::unordered_set<std::string> ids;
    for (const auto& r : records) {
        if (!ids.insert(r.respondent_id).second) {
            throw Error(ErrorCode::DuplicateId, "respondent_id '" + r.respondent_id + "' appears in more than one input");
        }
    }
    return records;
}

CommandResult cmd_ingest(const RunConfig& config) {
    ParseReport report;
    const auto records = load_records(config, &report);
    OutputSet out(config, "ingest");
    std::ostringstream table;
    write_respondent_table(table, records, config.schema.delimiter);
    out.write("respondents.csv", table.str());
    out.write("parse_report.json", report.to_json().dump(2) + "\n");
    return out.finish();
}

CommandResult cmd_fit_dist(const RunConfig& config) {
    const auto records = load_records(config);
    nlohmann::json doc;
    doc["bin_width"] = to_string(config.bin_width);
    doc["support"] = {config.support_min_bins(), config.support_max_bins()};
    const std::pair<const char*, std::optional<Gender>> groups[] = {
        {"female", Gender::female}, {"male", Gender::male}, {"pooled", std::nullopt}};
    for (const auto& [name, gender] : groups) {
        const auto ages = ages_at_first_birth(records, gender);
        nlohmann::json g;
        g["n"] = ages.size();
        try {
            const LognormalParams p = fit_lognormal(ages);
            g["lognormal"] = {{"mu", p.mu}, {"sigma", p.sigma}, {"n_fit", p.n_fit},
                              {"implied_mean_years", p.implied_mean()}, {"implied_sd_years", p.implied_sd()}};
            g["lognormal_pmf"] = discretize_pmf(p, config.bin_width, config.support_min_bins(), config.support_max_bins()).to_json();
            g["empirical_pmf"] = empirical_pmf(ages, config.bin_width, config.support_min_bins(), config.support_max_bins()).to_json();
        } catch (const Error& e) {
            if (!gender) throw;  // the pooled fit must succeed
            g["error"] = e.what();
        }
        doc[name] = std::move(g);
    }
    OutputSet out(config, "fit-dist");
    out.write("distribution.json", doc.dump(2) + "\n");
    return out.finish();
}

CommandResult cmd_trajectory(const RunConfig& config) {
    const auto records = load_records(config);
    const TauRange tau = config.tau_bins();
    const BinWidth bw = config.bin_width;
    const char d = config.schema.delimiter;
    const AgeAtEventPMF pmf_f = pmf_for(config, records, Gender::female);
    const AgeAtEventPMF pmf_m = pmf_for(config, records, Gender::male);

    OutputSet out(config, "trajectory");
    std::uint64_t stream = 0;
    for (TrajectoryOutcome panel : config.outcomes) {
        Outcome outcome = Outcome::income;
        FullTimeRule rule = FullTimeRule::any;
        switch (panel) {
            case TrajectoryOutcome::income: break;
            case TrajectoryOutcome::income_full_time: rule = config.full_time_rule; break;
            case TrajectoryOutcome::hours: outcome = Outcome::hours; break;
            case TrajectoryOutcome::full_time_share: outcome = Outcome::full_time_share; break;
        }

        std::ostringstream table;
        const auto& cols = trajectory_columns();
        for (std::size_t i = 0; i < cols.size(); ++i) table << (i ? std::string(1, d) : "") << cols[i];
        table << '\n';
        nlohmann::json cov = nlohmann::json::object();

        auto emit = [&](const TrajectoryEstimate& est, const std::string& group) {
            table << trajectory_rows(est, group, d);
            cov[group] = covariance_to_json(est);
        };
        for (Gender g : {Gender::female, Gender::male}) {
            const Subpopulation parents{g, Parenthood::parent, rule};
            emit(parent_trajectory(records, outcome, tau, parents, bw, config.event_binning),
                 g == Gender::female ? "mothers" : "fathers");
        }
        for (Gender g : {Gender::female, Gender::male}) {
            const Subpopulation control{g, Parenthood::childless, rule};
            const auto& pmf = g == Gender::female ? pmf_f : pmf_m;
            const auto stats = age_group_stats(records, outcome, control, bw);
            const std::string name = g == Gender::female ? "placebo_female" : "placebo_male";
            emit(analytical_placebo(stats, pmf, tau, config.weighting), name);
            if (config.mc_draws > 0) {
                const auto mc = monte_carlo_placebo(records, outcome, control, pmf, tau, config.mc_draws,
                                                    rng::stream_seed(config.seed, kMonteCarloStream + stream));
                emit(mc.estimate, name + "_mc");
            }
            ++stream;
        }
        const std::string base = "trajectory_" + std::string(to_string(panel));
        out.write(base + ".csv", table.str());
        out.write(base + "_covariance.json", cov.dump() + "\n");
    }
    return out.finish();
}

CommandResult cmd_gap(const RunConfig& config) {
    const auto records = load_records(config);
    OutputSet out(config, "gap");
    std::uint64_t stream = 0;
    for (GapOutcome outcome : config.gap_outcomes) {
        GapSetup setup{outcome, {}};
        if (outcome == GapOutcome::hourly_wage) setup.filter.full_time = config.full_time_rule;
        const GapReport report = bootstrap_gap(records, setup, config.bootstrap_rounds,
                                               rng::stream_seed(config.seed, kBootstrapStream + stream++));
        nlohmann::json j = report.to_json();
        j["filter"] = {{"full_time_rule", to_string(setup.filter.full_time)}};
        const std::string base = "gap_" + std::string(to_string(outcome));
        out.write(base + ".json", j.dump(2) + "\n");
        out.write(base + "_plot.csv", report.plot_table(config.schema.delimiter));
    }
    return out.finish();
}

CommandResult cmd_validate(const RunConfig& config) {
    PopulationSpec spec = config.synth;
    spec.seed = rng::stream_seed(config.seed, kSynthStream);
    ValidationOptions options;
    options.bin_width = config.bin_width;
    options.support_min_years = config.support_min;
    options.support_max_years = config.support_max;
    options.tau_min_years = config.tau_min;
    options.tau_max_years = config.tau_max;
    options.weighting = config.weighting;
    options.seed = rng::stream_seed(config.seed, kValidateStream);
    const ValidationReport report = run_validation(spec, config.validate_draws, config.validate_rounds, options);

    nlohmann::json doc = report.to_json();
    doc["spec"] = spec.to_json();
    OutputSet out(config, "validate");
    out.write("validation.json", doc.dump(2) + "\n");
    return out.finish();
}

CommandResult cmd_generate(const RunConfig& config) {
    PopulationSpec spec = config.synth;
    spec.seed = rng::stream_seed(config.seed, kSynthStream);
    const auto population = generate_population(spec);
    std::ostringstream table;
    if (config.generate_format == "canonical") {
        write_respondent_table(table, population, config.schema.delimiter);
    } else {
        write_raw_survey(table, to_raw_rows(population), config.schema);
    }
    OutputSet out(config, "generate");
    out.write("population.csv", table.str());
    out.write("population_spec.json", spec.to_json().dump(2) + "\n");
    return out.finish();
}

}  // namespace childpen
