#include "yieldcycle/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "yieldcycle/error.hpp"

namespace yieldcycle {

namespace {

using nlohmann::json;

const std::vector<std::string> kKnownKeys = {
    "data_dir", "calendar_dir", "output_dir", "countries", "target_country", "date_range", "asg", "cv", "seed",
    "classifiers", "grids", "level1_members", "level2_members", "threshold", "feature_preset", "ttest_alpha", "mic"};

void check_keys(const json& j, const std::vector<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw DataError("config: " + where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw DataError("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw DataError("config: '" + where + key + "' has the wrong type");
    }
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& text) {
    const std::filesystem::path p(text);
    return p.is_absolute() ? p : base / p;
}

Hyperparams read_params(const json& j, const std::string& where) {
    Hyperparams out;
    if (!j.is_object()) throw DataError("config: " + where + " must be an object");
    for (const auto& [name, value] : j.items()) {
        if (!value.is_number()) throw DataError("config: " + where + "." + name + " must be a number");
        out[name] = value.get<double>();
    }
    return out;
}

} // namespace

void PipelineConfig::validate() const {
    if (countries.empty()) throw DataError("config: 'countries' must list at least one training country");
    std::vector<std::string> sorted = countries;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DataError("config: 'countries' lists a country twice");
    }
    if (target_country.empty()) throw DataError("config: 'target_country' is empty");
    if (std::find(countries.begin(), countries.end(), target_country) != countries.end()) {
        throw DataError("config: target country " + target_country + " is also a training country");
    }
    if (date_range.empty()) throw DataError("config: 'date_range' is empty");
    try {
        asg.validate();
    } catch (const DataError& e) {
        throw DataError(std::string("config: 'asg': ") + e.what());
    }
    if (cv.folds < 2) throw DataError("config: 'cv.folds' must be >= 2");
    if (classifiers.empty()) throw DataError("config: 'classifiers' is empty");
    for (const auto& spec : classifiers) resolve(spec);
    for (const auto& [kind, grid] : grids) {
        if (!ClassifierRegistry::global().contains(kind)) throw DataError("config: grid for unknown kind " + kind);
        for (const auto& point : expand_grid({kind, {}}, grid)) resolve(point);
    }
    if (level1_members == 0 || level1_members % 2 == 0) throw DataError("config: 'level1_members' must be odd");
    if (level2_members == 0 || level2_members % 2 == 0) throw DataError("config: 'level2_members' must be odd");
    if (classifiers.size() < level1_members) {
        throw DataError("config: need at least " + std::to_string(level1_members) + " classifiers");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) throw DataError("config: 'threshold' must be in (0, 1)");
    if (!(ttest_alpha > 0.0 && ttest_alpha < 1.0)) throw DataError("config: 'ttest_alpha' must be in (0, 1)");
    if (!(mic.alpha > 0.0 && mic.alpha <= 1.0)) throw DataError("config: 'mic.alpha' must be in (0, 1]");
    if (!(mic.clump_factor > 0.0)) throw DataError("config: 'mic.clump_factor' must be positive");
}

std::filesystem::path PipelineConfig::calendar_path(const std::string& country) const {
    return (calendar_dir.empty() ? data_dir : calendar_dir) / (country + "_cycles.csv");
}

PipelineConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(j, kKnownKeys, "");
    PipelineConfig c;
    if (j.contains("data_dir")) c.data_dir = resolve_path(base_dir, get<std::string>(j, "data_dir", ""));
    else c.data_dir = base_dir;
    if (j.contains("calendar_dir")) c.calendar_dir = resolve_path(base_dir, get<std::string>(j, "calendar_dir", ""));
    if (j.contains("output_dir")) c.output_dir = resolve_path(base_dir, get<std::string>(j, "output_dir", ""));
    else c.output_dir = base_dir / "out";
    if (j.contains("countries")) c.countries = get<std::vector<std::string>>(j, "countries", "");
    if (j.contains("target_country")) c.target_country = get<std::string>(j, "target_country", "");
    if (j.contains("date_range")) {
        const auto& r = j.at("date_range");
        check_keys(r, {"first", "last"}, "date_range");
        if (r.contains("first")) c.date_range.first = Month::parse(get<std::string>(r, "first", "date_range."));
        if (r.contains("last")) c.date_range.last = Month::parse(get<std::string>(r, "last", "date_range."));
    }
    if (j.contains("asg")) {
        const auto& a = j.at("asg");
        check_keys(a, {"window", "cap", "sg_window", "sg_order", "sg_edge"}, "asg");
        if (a.contains("window")) c.asg.window = get<int>(a, "window", "asg.");
        if (a.contains("cap")) c.asg.cap = get<double>(a, "cap", "asg.");
        if (a.contains("sg_window")) c.asg.sg_window = get<int>(a, "sg_window", "asg.");
        if (a.contains("sg_order")) c.asg.sg_order = get<int>(a, "sg_order", "asg.");
        if (a.contains("sg_edge")) {
            const auto e = get<std::string>(a, "sg_edge", "asg.");
            if (e == "interpolate") c.asg.sg_edge = SavgolEdge::interpolate;
            else if (e == "mirror") c.asg.sg_edge = SavgolEdge::mirror;
            else throw DataError("config: asg.sg_edge must be 'interpolate' or 'mirror'");
        }
    }
    if (j.contains("cv")) {
        const auto& v = j.at("cv");
        check_keys(v, {"folds", "mode", "seed"}, "cv");
        if (v.contains("folds")) c.cv.folds = get<int>(v, "folds", "cv.");
        if (v.contains("mode")) c.cv.mode = parse_cv_mode(get<std::string>(v, "mode", "cv."));
        if (v.contains("seed")) c.seed = get<std::uint64_t>(v, "seed", "cv.");
    }
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", "");
    if (j.contains("classifiers")) {
        const auto& list = j.at("classifiers");
        if (!list.is_array()) throw DataError("config: 'classifiers' must be an array");
        c.classifiers.clear();
        for (const auto& item : list) {
            if (item.is_string()) {
                c.classifiers.push_back({item.get<std::string>(), {}});
                continue;
            }
            check_keys(item, {"kind", "params"}, "classifiers[]");
            ClassifierSpec spec{get<std::string>(item, "kind", "classifiers[]."), {}};
            if (item.contains("params")) spec.params = read_params(item.at("params"), "classifiers[].params");
            c.classifiers.push_back(std::move(spec));
        }
    }
    if (j.contains("grids")) {
        const auto& g = j.at("grids");
        if (!g.is_object()) throw DataError("config: 'grids' must be an object");
        for (const auto& [kind, entries] : g.items()) {
            Grid grid;
            if (!entries.is_object()) throw DataError("config: grids." + kind + " must be an object");
            for (const auto& [name, values] : entries.items()) {
                try {
                    grid[name] = values.get<std::vector<double>>();
                } catch (const json::exception&) {
                    throw DataError("config: grids." + kind + "." + name + " must be a list of numbers");
                }
            }
            if (grid.empty()) c.grids.erase(kind);
            else c.grids[kind] = std::move(grid);
        }
    }
    if (j.contains("level1_members")) c.level1_members = get<std::size_t>(j, "level1_members", "");
    if (j.contains("level2_members")) c.level2_members = get<std::size_t>(j, "level2_members", "");
    if (j.contains("threshold")) c.threshold = get<double>(j, "threshold", "");
    if (j.contains("feature_preset")) c.feature_preset = parse_feature_preset(get<std::string>(j, "feature_preset", ""));
    if (j.contains("ttest_alpha")) c.ttest_alpha = get<double>(j, "ttest_alpha", "");
    if (j.contains("mic")) {
        const auto& m = j.at("mic");
        check_keys(m, {"alpha", "clump_factor"}, "mic");
        if (m.contains("alpha")) c.mic.alpha = get<double>(m, "alpha", "mic.");
        if (m.contains("clump_factor")) c.mic.clump_factor = get<double>(m, "clump_factor", "mic.");
    }
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') c.output_dir = env;
    c.validate();
    return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file '" + path.string() + "'");
    std::stringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::string config_to_json(const PipelineConfig& c) {
    json j;
    j["countries"] = c.countries;
    j["target_country"] = c.target_country;
    j["date_range"] = {{"first", c.date_range.first.to_string()}, {"last", c.date_range.last.to_string()}};
    j["asg"] = {{"window", c.asg.window},
                {"cap", c.asg.cap},
                {"sg_window", c.asg.sg_window},
                {"sg_order", c.asg.sg_order},
                {"sg_edge", c.asg.sg_edge == SavgolEdge::interpolate ? "interpolate" : "mirror"}};
    j["cv"] = {{"folds", c.cv.folds}, {"mode", std::string(to_string(c.cv.mode))}};
    j["seed"] = c.seed;
    json specs = json::array();
    for (const auto& s : c.classifiers) specs.push_back({{"kind", s.kind}, {"params", s.params}});
    j["classifiers"] = specs;
    json grids = json::object();
    for (const auto& [kind, grid] : c.grids) grids[kind] = grid;
    j["grids"] = grids;
    j["level1_members"] = c.level1_members;
    j["level2_members"] = c.level2_members;
    j["threshold"] = c.threshold;
    j["feature_preset"] = std::string(to_string(c.feature_preset));
    j["ttest_alpha"] = c.ttest_alpha;
    j["mic"] = {{"alpha", c.mic.alpha}, {"clump_factor", c.mic.clump_factor}};
    return j.dump(2);
}

} // namespace yieldcycle
