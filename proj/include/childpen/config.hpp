#pragma once

#include "childpen/counterfactual_gap.hpp"
#include "childpen/event_distribution.hpp"
#include "childpen/placebo_trajectory.hpp"
#include "childpen/survey_ingest.hpp"
#include "childpen/synthgen.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace childpen {

/// Flat "key" / "section.key" -> value view of a configuration document.
using ConfigMap = std::map<std::string, std::string>;

enum class PmfMode { lognormal, empirical };
enum class PmfPool { by_gender, pooled };

/// Trajectory outcome panels: income, income among full-time workers, hours, share working >= 40h.
enum class TrajectoryOutcome { income, income_full_time, hours, full_time_share };
std::string_view to_string(TrajectoryOutcome o) noexcept;

struct RunConfig {
    std::vector<std::string> inputs;
    std::string input_format = "raw";  // raw | canonical
    SurveySchema schema = SurveySchema::identity();
    IncomeBandTable bands = IncomeBandTable::polish_ggs_default();
    PartialDate wave2_cutoff{2014, 12, 31};

    PmfMode pmf_mode = PmfMode::lognormal;
    PmfPool pmf_pool = PmfPool::by_gender;
    std::optional<std::string> pmf_file;
    BinWidth bin_width = BinWidth::yearly;
    long support_min = 15;  // years
    long support_max = 49;
    long tau_min = -5;      // years
    long tau_max = 15;
    Weighting weighting = Weighting::pmf_only;
    EventBinning event_binning = EventBinning::floor;
    std::vector<TrajectoryOutcome> outcomes{TrajectoryOutcome::income, TrajectoryOutcome::income_full_time,
                                            TrajectoryOutcome::hours, TrajectoryOutcome::full_time_share};
    FullTimeRule full_time_rule = FullTimeRule::exactly_40;
    std::size_t mc_draws = 0;

    std::vector<GapOutcome> gap_outcomes{GapOutcome::income, GapOutcome::hourly_wage};
    std::size_t bootstrap_rounds = kDefaultBootstrapRounds;

    std::uint64_t seed = 1;
    std::string output_dir = "out";

    PopulationSpec synth;  // seed derived from `seed`
    std::size_t validate_draws = 10000;
    std::size_t validate_rounds = 30;
    std::string generate_format = "raw";  // raw | canonical

    /// Support and tau range in bin units.
    [[nodiscard]] long support_min_bins() const { return support_min * bins_per_year(bin_width); }
    [[nodiscard]] long support_max_bins() const { return (support_max + 1) * bins_per_year(bin_width) - 1; }
    [[nodiscard]] TauRange tau_bins() const {
        return {tau_min * bins_per_year(bin_width), (tau_max + 1) * bins_per_year(bin_width) - 1};
    }
};

/// Reads an INI document: top-level keys plus [schema], [bands], [synth] sections.
/// Throws InvalidConfig.
ConfigMap read_config_file(const std::filesystem::path& path);
ConfigMap parse_config_text(const std::string& text);

/// Applies "key=value" overrides (later wins). Throws InvalidConfig on a malformed pair.
void apply_overrides(ConfigMap& map, const std::vector<std::string>& assignments);

/// Validates every key; unknown keys and bad values are errors naming the key.
RunConfig build_config(const ConfigMap& map);

/// Complete map of a config, defaults included; build_config(to_map(c)) == c.
ConfigMap to_map(const RunConfig& config);
/// Canonical INI text of a map; its hash identifies the run.
std::string to_ini(const ConfigMap& map);

}  // namespace childpen
