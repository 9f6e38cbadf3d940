#include "yieldcycle/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "csv.hpp"
#include "json.hpp"
#include "yieldcycle/data_ingest.hpp"
#include "yieldcycle/error.hpp"
#include "yieldcycle/random.hpp"

namespace yieldcycle {

namespace {

// Reference turning points: a leading recession, three full trough-to-trough
// cycles, and a closing peak.
const std::vector<std::pair<Month, TurningPoint>> kReferenceEvents = {
    {Month(1981, 7), TurningPoint::peak},   {Month(1982, 11), TurningPoint::trough},
    {Month(1990, 7), TurningPoint::peak},   {Month(1991, 3), TurningPoint::trough},
    {Month(2001, 3), TurningPoint::peak},   {Month(2001, 11), TurningPoint::trough},
    {Month(2007, 12), TurningPoint::peak},  {Month(2009, 6), TurningPoint::trough},
    {Month(2015, 11), TurningPoint::peak},
};

std::vector<double> ar1(Rng& rng, int n, double mean, double phi, double sigma) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double x = mean;
    for (auto& e : v) {
        x = mean + phi * (x - mean) + sigma * rng.normal();
        e = x;
    }
    return v;
}

std::vector<double> random_walk(Rng& rng, int n, double start, double drift, double sigma) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double x = start;
    for (auto& e : v) {
        x += drift + sigma * rng.normal();
        e = x;
    }
    return v;
}

void write_series(const std::filesystem::path& path, const Series& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << "month,value\n";
    for (std::size_t i = 0; i < s.size(); ++i) out << s.month_at(i).to_string() << ',' << csv::format_double(s.values[i]) << '\n';
}

} // namespace

SyntheticCountry generate_country(const SyntheticOptions& options, const std::string& country) {
    if (options.months < static_cast<int>(asg_min_length(options.asg)) + 2) {
        throw DataError("synthetic corpus needs more months for the ASG window");
    }
    options.asg.validate();
    const int n = options.months;
    Rng rng(derive_seed(options.seed, "synthetic/" + country, 0));

    SyntheticCountry out;
    out.country = country;
    std::vector<std::vector<double>> raw(kAsgCodes.size());
    raw[0] = random_walk(rng, n, 100.0, 0.0, 1.0);         // FF1
    raw[1] = random_walk(rng, n, 50.0, 0.25, 0.2);         // GM1
    raw[2] = random_walk(rng, n, 1000.0, 2.0, 4.0);        // GM2
    raw[3] = ar1(rng, n, 0.25, 0.9, 0.01);                 // I1
    raw[4] = ar1(rng, n, 1.5, 0.85, 0.2);                  // I2
    raw[5] = ar1(rng, n, 0.5, 0.8, 0.15);                  // MP1
    raw[6] = random_walk(rng, n, 7.0, 0.005, 0.04);        // MP2, log level
    for (auto& v : raw[6]) v = std::exp(v);

    // Features the signal needs, computed exactly as the pipeline will.
    std::vector<Series> signal_series;
    std::vector<double> weights;
    for (const auto& [name, weight] : options.signal) {
        bool found = false;
        for (std::size_t c = 0; c + 1 < kAsgCodes.size() && !found; ++c) {
            const bool level = name == level_feature_name(kAsgCodes[c]);
            const bool change = name == change_feature_name(kAsgCodes[c]);
            if (!level && !change) continue;
            const auto pair = asg_transform({country, kAsgCodes[c], {options.start, raw[c]}}, options.asg);
            signal_series.push_back(level ? pair.level.final_series() : pair.change.final_series());
            weights.push_back(weight);
            found = true;
        }
        if (!found) throw DataError("synthetic signal feature '" + name + "' is not an ASG feature of a non-yield code");
    }

    // Yield path: each move follows the planted direction.
    std::vector<double> yield(static_cast<std::size_t>(n));
    out.planted_labels.assign(static_cast<std::size_t>(n), 0);
    yield[0] = 8.0;
    for (int t = 0; t + 1 < n; ++t) {
        const Month m = options.start + t;
        bool have = true;
        double score = 0.0;
        for (std::size_t k = 0; k < signal_series.size(); ++k) {
            if (!signal_series[k].contains(m)) {
                have = false;
                break;
            }
            score += weights[k] * signal_series[k].at(m);
        }
        int dir = have ? (score >= 0.0 ? 1 : -1) : (rng.uniform() < 0.5 ? 1 : -1);
        if (rng.uniform() < options.flip_rate) dir = -dir;
        out.planted_labels[static_cast<std::size_t>(t)] = dir;
        const double size = 0.02 + 0.1 * std::abs(rng.normal());
        yield[static_cast<std::size_t>(t) + 1] = yield[static_cast<std::size_t>(t)] + dir * size;
    }
    raw[7] = std::move(yield);

    for (std::size_t c = 0; c < kAsgCodes.size(); ++c) {
        out.indicators.push_back({country, kAsgCodes[c], {options.start, std::move(raw[c])}});
    }

    out.calendar.country = country;
    const Month last = options.start + (n - 1);
    for (const auto& [month, kind] : kReferenceEvents) {
        const int shift = options.calendar_jitter > 0
                              ? static_cast<int>(rng.uniform_index(2 * static_cast<std::uint64_t>(options.calendar_jitter) + 1)) -
                                    options.calendar_jitter
                              : 0;
        const Month m = month + shift;
        if (m < options.start || m > last) continue;
        out.calendar.events.push_back({m, kind});
    }
    out.calendar.validate();
    return out;
}

std::vector<std::string> write_synthetic_corpus(const std::filesystem::path& dir, const SyntheticOptions& options) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    std::vector<std::string> all = options.countries;
    all.push_back(options.target);
    for (const auto& country : all) {
        const auto data = generate_country(options, country);
        for (const auto& s : data.indicators) {
            const auto path = indicator_path(dir, country, s.code);
            write_series(path, s.series);
            written.push_back(path.filename().string());
        }
        const auto cal = dir / (country + "_cycles.csv");
        std::ofstream out(cal, std::ios::binary);
        if (!out) throw DataError("cannot write '" + cal.string() + "'");
        out << "month,kind\n";
        for (const auto& e : data.calendar.events) {
            out << e.month.to_string() << ',' << (e.kind == TurningPoint::peak ? "peak" : "trough") << '\n';
        }
        written.push_back(cal.filename().string());
    }
    nlohmann::json config;
    config["data_dir"] = ".";
    config["output_dir"] = "out";
    config["countries"] = options.countries;
    config["target_country"] = options.target;
    config["date_range"] = {{"first", options.start.to_string()},
                            {"last", (options.start + (options.months - 1)).to_string()}};
    config["seed"] = options.seed;
    config["asg"] = {{"window", options.asg.window},
                     {"cap", options.asg.cap},
                     {"sg_window", options.asg.sg_window},
                     {"sg_order", options.asg.sg_order}};
    std::ofstream out(dir / "config.json", std::ios::binary);
    if (!out) throw DataError("cannot write '" + (dir / "config.json").string() + "'");
    out << config.dump(2) << '\n';
    written.push_back("config.json");
    return written;
}

} // namespace yieldcycle
