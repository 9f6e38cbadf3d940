// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "test_support.hpp"
#include "yieldcycle/asg.hpp"
#include "yieldcycle/config.hpp"
#include "yieldcycle/hypothesis.hpp"
#include "yieldcycle/importance.hpp"
#include "yieldcycle/mic.hpp"
#include "yieldcycle/mla.hpp"
#include "yieldcycle/savgol.hpp"
#include "yieldcycle/synthetic.hpp"
#include "yieldcycle/validation.hpp"

using namespace yieldcycle;
namespace yt = yieldcycle::testing;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

class Recorder {
public:
    void fail(const std::string& why) {
        if (v_.pass) v_.detail = why;
        v_.pass = false;
    }
    void check(bool ok, const std::string& why) {
        if (!ok) fail(why);
    }
    void note(const std::string& text) {
        if (v_.pass) v_.detail = text;
    }
    Verdict verdict() const { return v_; }

private:
    Verdict v_;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Verdict ttest_reproduction() {
    Recorder r;
    const std::vector<double> e = {0.175, 0.046, 0.014, 0.070, 0.095};
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = paired_t_test(e, 0.10);
    const double ms = seconds_since(t0) * 1e3;
    r.check(std::abs(res.t - 2.935) <= 1e-3, "t = " + fmt(res.t, 6));
    r.check(res.significant, "not significant");
    r.check(res.df == 4, "df = " + std::to_string(res.df));
    r.check(ms < 1.0, "took " + fmt(ms, 3) + " ms");
    r.note("t = " + fmt(res.t) + ", df = 4, critical = " + fmt(res.critical_value) + ", " + fmt(ms, 3) + " ms");
    return r.verdict();
}

Verdict hypothesis_matrix() {
    Recorder r;
    const auto m = cycle_hypothesis_matrix(yt::reference_hit_matrices(), 0.10);
    std::string cells;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            const auto& cell = m.cells[i][j];
            if (!cell || !cell->result) {
                r.fail("cell " + std::to_string(i + 1) + "," + std::to_string(j + 1) + " missing");
                continue;
            }
            const double t = cell->result->t;
            const double want = yt::reference_t_score(i, j);
            r.check(std::abs(t - want) <= 0.01, "MC" + std::to_string(i + 1) + " vs MC" + std::to_string(j + 1) +
                                                    ": t = " + fmt(t) + ", want " + fmt(want));
            r.check(cell->result->significant == (i == 1), "significance flag of MC" + std::to_string(i + 1) +
                                                               " vs MC" + std::to_string(j + 1));
            cells += (cells.empty() ? "" : " ") + fmt(t, 3) + (cell->result->significant ? "*" : "");
        }
    }
    r.note("t-scores " + cells + " (* significant)");
    return r.verdict();
}

Verdict level2_selection() {
    Recorder r;
    const std::size_t rows = 10000;
    const auto target = yt::threshold_target(rows, Cycle::MC2);
    std::vector<VotingEnsemble> level1;
    for (const auto& [country, rate] : yt::reference_level2_scores()) {
        level1.push_back(yt::ensemble_with_hits(country, Cycle::MC2, static_cast<std::size_t>(rate * rows + 0.5)));
    }
    const auto res = build_level2(Cycle::MC2, level1, target, 0.75, 3);
    auto chosen = res.selection.chosen;
    std::string text;
    for (const auto& c : chosen) text += (text.empty() ? "" : ",") + c;
    std::sort(chosen.begin(), chosen.end());
    r.check(res.ensemble.has_value(), "cycle rejected");
    r.check(chosen == std::vector<std::string>{"CND", "GRM", "UK"}, "chose {" + text + "}");
    r.note("chose {" + text + "}, excluded JPN and AUS");
    return r.verdict();
}

Verdict savgol_identity() {
    Recorder r;
    Rng rng(2024);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
        const auto n = 3 + rng.uniform_index(200);
        std::vector<double> x(n);
        for (auto& v : x) v = rng.normal() * std::pow(10.0, rng.uniform() * 4 - 2);
        const auto y = savgol_filter(x, 3, 2);
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(y[i] - x[i]));
    }
    r.check(worst <= 1e-9, "window 3 / order 2 deviates by " + std::to_string(worst));
    double quad = 0.0;
    for (int s = 0; s < 100; ++s) {
        const double a = rng.normal(), b = rng.normal(), c = rng.normal();
        std::vector<double> x(60);
        for (int i = 0; i < 60; ++i) {
            const double t = i * 0.25 - 5;
            x[i] = a + b * t + c * t * t;
        }
        const auto y = savgol_filter(x, 5, 2);
        for (int i = 0; i < 60; ++i) quad = std::max(quad, std::abs(y[i] - x[i]));
    }
    r.check(quad <= 1e-9, "window 5 / order 2 misses a quadratic by " + std::to_string(quad));
    char buf[128];
    std::snprintf(buf, sizeof buf, "max deviation %.1e (identity), %.1e (quadratic)", worst, quad);
    r.note(buf);
    return r.verdict();
}

Verdict asg_invariants() {
    Recorder r;
    Rng rng(77);
    std::size_t values = 0;
    for (int s = 0; s < 1000; ++s) {
        IndicatorSeries series{"X", IndicatorCode::FF1, {Month(1980, 1), {}}};
        const auto n = 30 + rng.uniform_index(400);
        double v = rng.normal() * 10;
        const bool walk = s % 2 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double shock = rng.normal() * (rng.uniform() < 0.02 ? 20.0 : 1.0);
            v = walk ? v + shock : 0.7 * v + shock;
            series.series.values.push_back(v);
        }
        const auto pair = asg_transform(series);
        for (const auto* t : {&pair.level, &pair.change}) {
            const double lo = *std::min_element(t->s2.begin(), t->s2.end());
            if (lo != 0.0) r.fail("min(s2) = " + std::to_string(lo) + " on series " + std::to_string(s));
            for (std::size_t i = 0; i < t->size(); ++i) {
                ++values;
                if (std::abs(t->final[i]) > 6.0) r.fail("final out of range on series " + std::to_string(s));
                if (std::abs(t->ex_out[i]) > 3.0) r.fail("|ex_out| > 3 on series " + std::to_string(s));
                if (t->s2[i] > 0 && (t->final[i] > 0 ? 1 : -1) != t->ds3[i])
                    r.fail("sign(final) != ds3 on series " + std::to_string(s));
            }
        }
    }
    r.note("1000 series, " + std::to_string(values) + " feature values checked");
    return r.verdict();
}

Verdict oracles() {
    Recorder r;
    for (int mask = 0; mask < 8; ++mask) {
        VotingEnsemble vc;
        vc.feature_names = {"f0"};
        int sum = 0;
        for (int k = 0; k < 3; ++k) {
            const int v = mask >> k & 1 ? 1 : -1;
            sum += v;
            vc.models.push_back(yt::function_model(1, [v](std::span<const double>) { return static_cast<double>(v); }));
        }
        r.check(vote(vc, std::vector<double>{0.0}) == (sum > 0 ? 1 : -1), "vote pattern " + std::to_string(mask));
    }
    std::size_t compared = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto train_set = yt::shuffled_labels(yt::cluster_dataset(200, 4, 1.0, seed), seed + 7);
        const auto queries = yt::cluster_dataset(200, 4, 1.0, seed + 100);
        for (int k : {1, 5, 9}) {
            const auto m = train({"KNN", {{"n_neighbors", static_cast<double>(k)}}}, train_set, 0);
            const auto pred = m.predict_rows(queries.features);
            for (Eigen::Index q = 0; q < queries.features.rows(); ++q) {
                std::vector<std::pair<double, std::size_t>> d;
                for (Eigen::Index i = 0; i < train_set.features.rows(); ++i) {
                    double s = 0;
                    for (Eigen::Index j = 0; j < 4; ++j) {
                        const double diff = train_set.features(i, j) - queries.features(q, j);
                        s += diff * diff;
                    }
                    d.push_back({s, static_cast<std::size_t>(i)});
                }
                std::sort(d.begin(), d.end());
                int votes = 0;
                for (int i = 0; i < k; ++i) votes += train_set.labels[d[static_cast<std::size_t>(i)].second];
                ++compared;
                if (pred[static_cast<std::size_t>(q)] != (votes >= 0 ? 1 : -1)) r.fail("KNN differs from brute force");
            }
        }
    }
    r.note("8 vote patterns; " + std::to_string(compared) + " KNN predictions match brute force");
    return r.verdict();
}

Verdict classifier_sanity() {
    Recorder r;
    const auto clusters = yt::cluster_dataset(500, 4, 6.0, 31);
    const auto shuffled = yt::shuffled_labels(clusters, 32);
    std::string text;
    for (const auto& spec : default_specs()) {
        const double sep = cross_validate(spec, clusters, {}, 5).mean_hit_rate;
        const double chance = cross_validate(spec, shuffled, {}, 5).mean_hit_rate;
        r.check(sep >= 0.95, spec.kind + " scores " + fmt(sep) + " on separated clusters");
        r.check(chance >= 0.35 && chance <= 0.65, spec.kind + " scores " + fmt(chance) + " on shuffled labels");
        text += (text.empty() ? "" : ", ") + spec.kind + " " + fmt(sep, 3) + "/" + fmt(chance, 3);
    }
    r.note(text);
    return r.verdict();
}

Verdict importance_rows() {
    Recorder r;
    std::map<std::pair<std::string, Cycle>, TrainedModel> models;
    const auto& names = all_feature_names();
    const std::size_t planted = 6; // GM2_L
    Rng rng(5);
    for (const char* country : {"UK", "AUS", "GRM", "JPN", "CND"}) {
        for (auto cycle : kAllCycles) {
            Eigen::MatrixXd X(150, static_cast<Eigen::Index>(names.size()));
            std::vector<int> y;
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                y.push_back(rng.uniform() < 0.5 ? 1 : -1);
                for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = rng.normal() * 3;
                X(i, static_cast<Eigen::Index>(planted)) = 2.0 * y.back() + rng.uniform() - 0.5;
            }
            const auto d = Dataset::from_arrays(X, y, names, {country, cycle});
            models[{country, cycle}] = train({"GradientBoosting", {{"n_estimators", 50}}}, d, 9);
        }
    }
    std::size_t rows = 0;
    for (const auto& [cycle, table] : importance_heatmap(models)) {
        for (std::size_t k = 0; k < table.values.size(); ++k) {
            const auto& row = table.values[k];
            ++rows;
            double sum = 0;
            for (double v : row) {
                sum += v;
                if (v < 0) r.fail("negative importance");
            }
            r.check(std::abs(sum - 1.0) <= 1e-6, "row sums to " + std::to_string(sum));
            r.check(static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()) == planted,
                    table.countries[k] + " " + std::string(to_string(cycle)) + ": planted feature not first");
        }
    }
    r.check(rows == 15, std::to_string(rows) + " rows");
    r.note(std::to_string(rows) + " rows of 17 features sum to 1; planted " + names[planted] + " ranks first");
    return r.verdict();
}

Verdict synthetic_end_to_end() {
    Recorder r;
    yt::TempDir dir("acceptance");
    SyntheticOptions opt;
    write_synthetic_corpus(dir.path(), opt);
    auto config = load_config(dir.path() / "config.json");
    std::vector<std::string> reports;
    std::vector<std::vector<std::string>> files;
    double longest = 0.0, rate = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        config.output_dir = dir.path() / ("out" + std::to_string(pass));
        std::ostringstream log;
        const auto t0 = std::chrono::steady_clock::now();
        const auto written = cli::cmd_run(config, 1, log);
        longest = std::max(longest, seconds_since(t0));
        files.push_back({});
        for (const auto& f : written) files.back().push_back(yt::read_file(config.output_dir / f));
        const auto line = log.str();
        const auto at = line.find("overall hit rate: ");
        if (at == std::string::npos) {
            r.fail("no overall hit rate printed");
            return r.verdict();
        }
        rate = std::stod(line.substr(at + 18));
    }
    r.check(longest < 300.0, "run took " + fmt(longest, 1) + " s");
    r.check(rate >= 0.80, "overall hit rate " + fmt(rate));
    r.check(files[0] == files[1], "reruns differ");
    r.note("overall hit rate " + fmt(rate) + ", " + fmt(longest, 1) + " s per run, " + std::to_string(files[0].size()) +
           " output files byte-identical");
    return r.verdict();
}

Verdict mic_properties() {
    Recorder r;
    std::vector<double> x(100);
    Rng rng(10);
    for (auto& v : x) v = rng.uniform();
    const double self = mic(x, x);
    r.check(self >= 0.99, "mic(x, x) = " + fmt(self));
    double asym = 0.0;
    for (int s = 0; s < 20; ++s) {
        std::vector<double> a(150), b(150);
        for (int i = 0; i < 150; ++i) {
            a[i] = rng.normal();
            b[i] = std::sin(2 * a[i]) + rng.normal() * (s % 4) * 0.3;
        }
        asym = std::max(asym, std::abs(mic(a, b) - mic(b, a)));
    }
    r.check(asym <= 1e-9, "asymmetry " + std::to_string(asym));
    double worst = 0.0;
    int monotone = 0;
    for (const auto& f : yt::load_mic_fixtures()) {
        if (f.x.size() != 200) continue;
        std::vector<double> xm, ym;
        for (double v : f.x) xm.push_back(std::exp(3 * v));
        for (double v : f.y) ym.push_back(v * v * v);
        worst = std::max(worst, std::abs(mic(xm, ym) - f.mic_monotone));
        worst = std::max(worst, std::abs(mic(f.x, f.y) - f.mic));
        ++monotone;
    }
    r.check(monotone == 10, std::to_string(monotone) + " reference datasets");
    r.check(worst <= 0.02, "largest gap to the reference " + fmt(worst, 6));
    char buf[160];
    std::snprintf(buf, sizeof buf, "mic(x,x) = %.4f, asymmetry %.1e, largest reference gap %.1e over %d datasets", self,
                  asym, worst, monotone);
    r.note(buf);
    return r.verdict();
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"paired t-test on the worked differences", ttest_reproduction},
        {"cross-cycle t-score matrix", hypothesis_matrix},
        {"level-2 selection", level2_selection},
        {"Sav-Gol identity and polynomial reproduction", savgol_identity},
        {"ASG invariants", asg_invariants},
        {"vote and KNN oracles", oracles},
        {"classifier sanity", classifier_sanity},
        {"importance normalization", importance_rows},
        {"synthetic end-to-end", synthetic_end_to_end},
        {"MIC properties", mic_properties},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS " : "FAIL ") << (i + 1) << " " << criteria[i].first << ": " << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
