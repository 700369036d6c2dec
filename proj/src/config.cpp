#include "childpen/config.hpp"

#include "childpen/error.hpp"
#include "childpen/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace childpen {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw Error(ErrorCode::InvalidConfig, key + ": " + what);
}

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, sep)) {
        item = io::trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& items, const std::function<std::string(const T&)>& fmt, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += fmt(items[i]);
    }
    return out;
}

long as_long(const std::string& key, const std::string& v) {
    auto n = io::parse_int(v);
    if (!n) fail(key, "expected an integer, got '" + v + "'");
    return long(*n);
}

std::size_t as_count(const std::string& key, const std::string& v, std::size_t min) {
    auto n = io::parse_int(v);
    if (!n || *n < static_cast<long long>(min)) fail(key, "expected an integer >= " + std::to_string(min) + ", got '" + v + "'");
    return std::size_t(*n);
}

double as_double(const std::string& key, const std::string& v) {
    auto d = io::parse_double(v);
    if (!d) fail(key, "expected a number, got '" + v + "'");
    return *d;
}

template <class E>
E as_enum(const std::string& key, const std::string& v, std::initializer_list<std::pair<const char*, E>> options) {
    std::string allowed;
    for (const auto& [name, value] : options) {
        if (v == name) return value;
        allowed += std::string(allowed.empty() ? "" : ", ") + name;
    }
    fail(key, "expected one of {" + allowed + "}, got '" + v + "'");
}

std::vector<Knot> as_knots(const std::string& key, const std::string& v) {
    std::vector<Knot> knots;
    for (const auto& item : split_list(v)) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) fail(key, "knot '" + item + "' is not x:y");
        knots.push_back({as_double(key, item.substr(0, colon)), as_double(key, item.substr(colon + 1))});
    }
    return knots;
}

std::string knots_text(const std::vector<Knot>& knots) {
    return join<Knot>(knots, [](const Knot& k) { return io::format_double(k.x) + ":" + io::format_double(k.y); });
}

char as_delimiter(const std::string& key, const std::string& v) {
    if (v == "tab" || v == "\\t") return '\t';
    if (v == "comma") return ',';
    if (v == "semicolon") return ';';
    if (v.size() == 1 && v != "\"") return v[0];
    fail(key, "expected a single character, 'tab', 'comma' or 'semicolon'");
}

std::string delimiter_text(char d) {
    switch (d) {
        case '\t': return "tab";
        case ',': return "comma";
        case ';': return "semicolon";
        default: return std::string(1, d);
    }
}

IncomeBand as_band(const std::string& key, int id, const std::string& v) {
    std::string text = io::trim(v);
    if (!text.empty() && text.back() == '+') return {id, as_double(key, text.substr(0, text.size() - 1)), std::nullopt};
    const auto parts = io::split_record(text, ',');
    if (parts.size() != 2) fail(key, "expected 'lower,upper' or 'lower+'");
    IncomeBand band{id, as_double(key, parts[0]), std::nullopt};
    if (!io::trim(parts[1]).empty()) band.upper = as_double(key, parts[1]);
    return band;
}

std::string band_text(const IncomeBand& b) {
    return b.upper ? io::format_double(b.lower) + "," + io::format_double(*b.upper) : io::format_double(b.lower) + "+";
}

const std::set<std::string>& top_level_keys() {
    static const std::set<std::string> keys = {
        "input",         "input_format",   "delimiter",       "wave2_cutoff",   "pmf_mode",
        "pmf_pool",      "pmf_file",       "bin_width",       "support_min",    "support_max",
        "tau_min",       "tau_max",        "weighting",       "event_binning",  "outcomes",
        "full_time_rule", "mc_draws",      "gap_outcomes",    "bootstrap_rounds", "seed",
        "output_dir",    "validate_draws", "validate_rounds", "generate_format",
    };
    return keys;
}

const std::set<std::string>& synth_keys() {
    static const std::set<std::string> keys = {
        "n_childless", "n_parents", "age_min", "age_max", "female_share", "age_density",
        "income_profile_female", "income_profile_male", "child_effect_female", "child_effect_male",
        "anticipation_onset", "min_event_time", "noise_sd", "full_time_share_female", "full_time_share_male",
        "birth_mu", "birth_sigma", "spec_file",
    };
    return keys;
}

constexpr std::initializer_list<std::pair<const char*, TrajectoryOutcome>> kTrajectoryOutcomes = {
    {"income", TrajectoryOutcome::income},
    {"income_full_time", TrajectoryOutcome::income_full_time},
    {"hours", TrajectoryOutcome::hours},
    {"full_time_share", TrajectoryOutcome::full_time_share},
};

constexpr std::initializer_list<std::pair<const char*, GapOutcome>> kGapOutcomes = {
    {"income", GapOutcome::income},
    {"hourly_wage", GapOutcome::hourly_wage},
};

void flatten(const pt::ptree& tree, ConfigMap& out) {
    for (const auto& [key, node] : tree) {
        if (node.empty()) {
            out[key] = io::trim(node.data());
        } else {
            for (const auto& [sub, leaf] : node) {
                if (!leaf.empty()) fail(key + "." + sub, "sections may not nest");
                out[key + "." + sub] = io::trim(leaf.data());
            }
        }
    }
}

}  // namespace

std::string_view to_string(TrajectoryOutcome o) noexcept {
    for (const auto& [name, value] : kTrajectoryOutcomes) {
        if (value == o) return name;
    }
    return "income";
}

ConfigMap read_config_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::InvalidConfig, "config file not found: " + path.string());
    return parse_config_text(io::read_file(path));
}

ConfigMap parse_config_text(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
    }
    ConfigMap map;
    flatten(tree, map);
    return map;
}

void apply_overrides(ConfigMap& map, const std::vector<std::string>& assignments) {
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) fail(a, "override must be key=value");
        map[io::trim(a.substr(0, eq))] = io::trim(a.substr(eq + 1));
    }
}

RunConfig build_config(const ConfigMap& map) {
    RunConfig c;
    std::map<std::string, std::string> schema_columns;
    std::vector<IncomeBand> bands;
    std::optional<std::string> spec_file;
    ConfigMap synth_values;

    for (const auto& [key, value] : map) {
        const auto dot = key.find('.');
        if (dot != std::string::npos) {
            const std::string section = key.substr(0, dot);
            const std::string name = key.substr(dot + 1);
            if (section == "schema") {
                const auto& fields = SurveySchema::logical_fields();
                if (std::find(fields.begin(), fields.end(), name) == fields.end()) fail(key, "unknown survey field");
                if (value.empty()) fail(key, "empty column name");
                schema_columns[name] = value;
            } else if (section == "bands") {
                const long id = as_long(key, name);
                if (id < 1 || id > 13) fail(key, "band ids run 1..13");
                bands.push_back(as_band(key, int(id), value));
            } else if (section == "synth") {
                if (!synth_keys().contains(name)) fail(key, "unknown key");
                if (name == "spec_file") {
                    if (!value.empty()) spec_file = value;
                } else {
                    synth_values[name] = value;
                }
            } else {
                fail(key, "unknown section '" + section + "'");
            }
            continue;
        }
        if (!top_level_keys().contains(key)) fail(key, "unknown key");

        if (key == "input") c.inputs = split_list(value);
        else if (key == "input_format") c.input_format = as_enum<std::string>(key, value, {{"raw", "raw"}, {"canonical", "canonical"}});
        else if (key == "delimiter") c.schema.delimiter = as_delimiter(key, value);
        else if (key == "wave2_cutoff") {
            auto d = parse_date(value);
            if (!d) fail(key, "expected YYYY[-MM[-DD]]");
            c.wave2_cutoff = *d;
        }
        else if (key == "pmf_mode") c.pmf_mode = as_enum(key, value, {std::pair{"lognormal", PmfMode::lognormal}, {"empirical", PmfMode::empirical}});
        else if (key == "pmf_pool") c.pmf_pool = as_enum(key, value, {std::pair{"by_gender", PmfPool::by_gender}, {"pooled", PmfPool::pooled}});
        else if (key == "pmf_file") c.pmf_file = value.empty() ? std::nullopt : std::optional<std::string>(value);
        else if (key == "bin_width") c.bin_width = as_enum(key, value, {std::pair{"yearly", BinWidth::yearly}, {"monthly", BinWidth::monthly}});
        else if (key == "support_min") c.support_min = as_long(key, value);
        else if (key == "support_max") c.support_max = as_long(key, value);
        else if (key == "tau_min") c.tau_min = as_long(key, value);
        else if (key == "tau_max") c.tau_max = as_long(key, value);
        else if (key == "weighting") c.weighting = as_enum(key, value, {std::pair{"pmf_only", Weighting::pmf_only}, {"population_weighted", Weighting::population_weighted}});
        else if (key == "event_binning") c.event_binning = as_enum(key, value, {std::pair{"floor", EventBinning::floor}, {"nearest", EventBinning::nearest}});
        else if (key == "outcomes") {
            c.outcomes.clear();
            for (const auto& o : split_list(value)) c.outcomes.push_back(as_enum(key, o, kTrajectoryOutcomes));
            if (c.outcomes.empty()) fail(key, "at least one outcome required");
        }
        else if (key == "full_time_rule") c.full_time_rule = as_enum(key, value, {std::pair{"exactly_40", FullTimeRule::exactly_40}, {"at_least_40", FullTimeRule::at_least_40}});
        else if (key == "mc_draws") c.mc_draws = as_count(key, value, 0);
        else if (key == "gap_outcomes") {
            c.gap_outcomes.clear();
            for (const auto& o : split_list(value)) c.gap_outcomes.push_back(as_enum(key, o, kGapOutcomes));
            if (c.gap_outcomes.empty()) fail(key, "at least one outcome required");
        }
        else if (key == "bootstrap_rounds") c.bootstrap_rounds = as_count(key, value, 1);
        else if (key == "seed") {
            auto n = io::parse_int(value);
            if (!n || *n < 0) fail(key, "expected a non-negative integer");
            c.seed = std::uint64_t(*n);
        }
        else if (key == "output_dir") {
            if (value.empty()) fail(key, "must not be empty");
            c.output_dir = value;
        }
        else if (key == "validate_draws") c.validate_draws = as_count(key, value, 100);
        else if (key == "validate_rounds") c.validate_rounds = as_count(key, value, 2);
        else if (key == "generate_format") c.generate_format = as_enum<std::string>(key, value, {{"raw", "raw"}, {"canonical", "canonical"}});
    }

    if (c.support_min < 1 || c.support_max < c.support_min) fail("support_min", "need 1 <= support_min <= support_max");
    if (c.tau_max < c.tau_min) fail("tau_min", "tau_min must not exceed tau_max");

    for (const auto& [field, column] : schema_columns) c.schema.columns[field] = column;
    if (!bands.empty()) {
        if (bands.size() != IncomeBandTable::kBandCount) fail("bands", "all 13 bands must be given when overriding");
        c.bands = IncomeBandTable(bands);
    }

    if (spec_file) {
        try {
            c.synth = PopulationSpec::from_json(nlohmann::json::parse(io::read_file(*spec_file)));
        } catch (const nlohmann::json::exception& e) {
            fail("synth.spec_file", e.what());
        } catch (const Error& e) {
            if (e.code() == ErrorCode::FileNotFound) fail("synth.spec_file", "file not found: " + *spec_file);
            throw;
        }
    }
    PopulationSpec& s = c.synth;
    for (const auto& [name, value] : synth_values) {
        const std::string key = "synth." + name;
        if (name == "n_childless") s.n_childless = as_count(key, value, 0);
        else if (name == "n_parents") s.n_parents = as_count(key, value, 0);
        else if (name == "age_min") s.age_min = as_double(key, value);
        else if (name == "age_max") s.age_max = as_double(key, value);
        else if (name == "female_share") s.female_share = as_double(key, value);
        else if (name == "age_density") s.age_density = as_knots(key, value);
        else if (name == "income_profile_female") s.income_profile_female = as_knots(key, value);
        else if (name == "income_profile_male") s.income_profile_male = as_knots(key, value);
        else if (name == "child_effect_female") s.child_effect_female = as_knots(key, value);
        else if (name == "child_effect_male") s.child_effect_male = as_knots(key, value);
        else if (name == "anticipation_onset") s.anticipation_onset = as_double(key, value);
        else if (name == "min_event_time") s.min_event_time = as_double(key, value);
        else if (name == "noise_sd") s.noise_sd = as_double(key, value);
        else if (name == "full_time_share_female") s.full_time_share_female = as_double(key, value);
        else if (name == "full_time_share_male") s.full_time_share_male = as_double(key, value);
        else if (name == "birth_mu") s.age_at_birth.mu = as_double(key, value);
        else if (name == "birth_sigma") s.age_at_birth.sigma = as_double(key, value);
    }
    s.validate();
    return c;
}

ConfigMap to_map(const RunConfig& c) {
    ConfigMap m;
    m["input"] = join<std::string>(c.inputs, [](const std::string& s) { return s; });
    m["input_format"] = c.input_format;
    m["delimiter"] = delimiter_text(c.schema.delimiter);
    m["wave2_cutoff"] = c.wave2_cutoff.to_string();
    m["pmf_mode"] = c.pmf_mode == PmfMode::lognormal ? "lognormal" : "empirical";
    m["pmf_pool"] = c.pmf_pool == PmfPool::by_gender ? "by_gender" : "pooled";
    m["pmf_file"] = c.pmf_file.value_or("");
    m["bin_width"] = to_string(c.bin_width);
    m["support_min"] = std::to_string(c.support_min);
    m["support_max"] = std::to_string(c.support_max);
    m["tau_min"] = std::to_string(c.tau_min);
    m["tau_max"] = std::to_string(c.tau_max);
    m["weighting"] = to_string(c.weighting);
    m["event_binning"] = to_string(c.event_binning);
    m["outcomes"] = join<TrajectoryOutcome>(c.outcomes, [](const TrajectoryOutcome& o) { return std::string(to_string(o)); });
    m["full_time_rule"] = to_string(c.full_time_rule);
    m["mc_draws"] = std::to_string(c.mc_draws);
    m["gap_outcomes"] = join<GapOutcome>(c.gap_outcomes, [](const GapOutcome& o) { return std::string(to_string(o)); });
    m["bootstrap_rounds"] = std::to_string(c.bootstrap_rounds);
    m["seed"] = std::to_string(c.seed);
    m["output_dir"] = c.output_dir;
    m["validate_draws"] = std::to_string(c.validate_draws);
    m["validate_rounds"] = std::to_string(c.validate_rounds);
    m["generate_format"] = c.generate_format;

    for (const auto& [field, column] : c.schema.columns) m["schema." + field] = column;
    for (const auto& b : c.bands.bands()) m["bands." + std::to_string(b.id)] = band_text(b);

    const PopulationSpec& s = c.synth;
    m["synth.n_childless"] = std::to_string(s.n_childless);
    m["synth.n_parents"] = std::to_string(s.n_parents);
    m["synth.age_min"] = io::format_double(s.age_min);
    m["synth.age_max"] = io::format_double(s.age_max);
    m["synth.female_share"] = io::format_double(s.female_share);
    m["synth.age_density"] = knots_text(s.age_density);
    m["synth.income_profile_female"] = knots_text(s.income_profile_female);
    m["synth.income_profile_male"] = knots_text(s.income_profile_male);
    m["synth.child_effect_female"] = knots_text(s.child_effect_female);
    m["synth.child_effect_male"] = knots_text(s.child_effect_male);
    m["synth.anticipation_onset"] = io::format_double(s.anticipation_onset);
    m["synth.min_event_time"] = io::format_double(s.min_event_time);
    m["synth.noise_sd"] = io::format_double(s.noise_sd);
    m["synth.full_time_share_female"] = io::format_double(s.full_time_share_female);
    m["synth.full_time_share_male"] = io::format_double(s.full_time_share_male);
    m["synth.birth_mu"] = io::format_double(s.age_at_birth.mu);
    m["synth.birth_sigma"] = io::format_double(s.age_at_birth.sigma);
    return m;
}

std::string to_ini(const ConfigMap& map) {
    std::ostringstream out;
    std::string current;
    // std::map orders plain keys before "section.key" only by accident; emit them explicitly first.
    for (const auto& [key, value] : map) {
        if (key.find('.') == std::string::npos) out << key << " = " << value << '\n';
    }
    for (const auto& [key, value] : map) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) continue;
        const std::string section = key.substr(0, dot);
        if (section != current) {
            out << '\n' << '[' << section << "]\n";
            current = section;
        }
        out << key.substr(dot + 1) << " = " << value << '\n';
    }
    return out.str();
}

}  // namespace childpen
