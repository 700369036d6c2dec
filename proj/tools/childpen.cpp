// childpen: command-line front end for the child-penalty estimation pipeline.

#include "childpen/commands.hpp"
#include "childpen/config.hpp"
#include "childpen/error.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct Options {
    std::string config_file;
    std::vector<std::string> overrides;
    std::vector<std::string> inputs;
    std::string output_dir;
    std::string seed;
    std::string rounds;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("-c,--config", o.config_file, "INI configuration file");
    sub->add_option("-s,--set", o.overrides, "Override a config key (key=value, section.key=value)");
    sub->add_option("-i,--input", o.inputs, "Input file(s); overrides 'input'");
    sub->add_option("-o,--output-dir", o.output_dir, "Output directory; overrides 'output_dir'");
    sub->add_option("--seed", o.seed, "Top-level random seed; overrides 'seed'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parenthood-effect estimation: placebo-event trajectories and counterfactual gender gaps"};
    app.set_version_flag("--version", std::string(CHILDPEN_VERSION));
    app.require_subcommand(1);

    Options opts;
    using Command = std::function<childpen::CommandResult(const childpen::RunConfig&)>;
    const std::vector<std::tuple<std::string, std::string, Command>> commands = {
        {"ingest", "Parse survey microdata into the canonical respondent table", childpen::cmd_ingest},
        {"fit-dist", "Fit the age-at-first-birth distribution and emit PMFs", childpen::cmd_fit_dist},
        {"trajectory", "Parent and placebo event-time trajectories", childpen::cmd_trajectory},
        {"gap", "Observed and counterfactual gender gaps with bootstrap bands", childpen::cmd_gap},
        {"validate", "Validate the estimators on a synthetic population", childpen::cmd_validate},
        {"generate", "Write a synthetic population", childpen::cmd_generate},
    };
    std::map<CLI::App*, Command> handlers;
    for (const auto& [name, help, fn] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub, opts);
        if (name == "gap") sub->add_option("--rounds", opts.rounds, "Bootstrap rounds; overrides 'bootstrap_rounds'");
        handlers[sub] = fn;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        childpen::ConfigMap map;
        if (!opts.config_file.empty()) map = childpen::read_config_file(opts.config_file);
        std::vector<std::string> assignments;
        if (!opts.inputs.empty()) {
            std::string joined;
            for (const auto& in : opts.inputs) joined += (joined.empty() ? "" : ",") + in;
            assignments.push_back("input=" + joined);
        }
        if (!opts.output_dir.empty()) assignments.push_back("output_dir=" + opts.output_dir);
        if (!opts.seed.empty()) assignments.push_back("seed=" + opts.seed);
        if (!opts.rounds.empty()) assignments.push_back("bootstrap_rounds=" + opts.rounds);
        assignments.insert(assignments.end(), opts.overrides.begin(), opts.overrides.end());
        childpen::apply_overrides(map, assignments);
        const childpen::RunConfig config = childpen::build_config(map);

        for (const auto& [sub, handler] : handlers) {
            if (!sub->parsed()) continue;
            const auto result = handler(config);
            for (const auto& path : result.outputs) std::cout << path.string() << '\n';
        }
        return 0;
    } catch (const childpen::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
