#include "yieldcycle/validation.hpp"

#include <algorithm>
#include <numeric>

#include "yieldcycle/error.hpp"
#include "yieldcycle/random.hpp"

namespace yieldcycle {

double hit_rate(std::span<const int> predicted, std::span<const int> actual) {
    if (predicted.size() != actual.size()) throw DataError("hit rate needs equally sized label vectors");
    if (actual.empty()) throw DataError("hit rate of an empty set");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) correct += predicted[i] == actual[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(actual.size());
}

CvMode parse_cv_mode(std::string_view text) {
    if (text == "stratified") return CvMode::stratified;
    if (text == "walk_forward") return CvMode::walk_forward;
    throw DataError("unknown cv mode '" + std::string(text) + "' (stratified, walk_forward)");
}

std::string_view to_string(CvMode mode) { return mode == CvMode::stratified ? "stratified" : "walk_forward"; }

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw DataError("cross-validation needs at least 2 folds");
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] > 0 ? pos : neg).push_back(i);
    const auto uk = static_cast<std::size_t>(k);
    if (pos.size() < uk || neg.size() < uk) {
        throw DataError("stratified " + std::to_string(k) + "-fold cross-validation needs at least " +
                        std::to_string(k) + " rows of each class (have " + std::to_string(pos.size()) + " up, " +
                        std::to_string(neg.size()) + " down)");
    }
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(uk);
    std::size_t next = 0;
    for (auto* cls : {&pos, &neg}) {
        rng.shuffle(std::span<std::size_t>(*cls));
        // Continue the round-robin across classes so fold sizes differ by at most one.
        for (auto i : *cls) folds[next++ % uk].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

namespace {

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

std::vector<Split> make_splits(const Dataset& data, const CvOptions& options, std::uint64_t seed) {
    const std::size_t n = data.rows();
    std::vector<Split> splits;
    if (options.mode == CvMode::stratified) {
        auto folds = stratified_folds(data.labels, options.folds, seed);
        for (std::size_t f = 0; f < folds.size(); ++f) {
            Split s;
            s.test = std::move(folds[f]);
            std::vector<bool> held(n, false);
            for (auto i : s.test) held[i] = true;
            for (std::size_t i = 0; i < n; ++i) {
                if (!held[i]) s.train.push_back(i);
            }
            splits.push_back(std::move(s));
        }
        return splits;
    }
    if (options.folds < 2) throw DataError("cross-validation needs at least 2 folds");
    const auto blocks = static_cast<std::size_t>(options.folds) + 1;
    if (n < blocks) {
        throw DataError("walk-forward " + std::to_string(options.folds) + "-fold cross-validation needs at least " +
                        std::to_string(blocks) + " rows");
    }
    std::vector<std::size_t> bounds(blocks + 1);
    for (std::size_t b = 0; b <= blocks; ++b) bounds[b] = b * n / blocks;
    for (std::size_t f = 0; f + 1 < blocks; ++f) {
        Split s;
        for (std::size_t i = 0; i < bounds[f + 1]; ++i) s.train.push_back(i);
        for (std::size_t i = bounds[f + 1]; i < bounds[f + 2]; ++i) s.test.push_back(i);
        splits.push_back(std::move(s));
    }
    return splits;
}

} // namespace

CvReport cross_validate(const ClassifierSpec& spec, const Dataset& data, const CvOptions& options,
                        std::uint64_t seed) {
    data.validate();
    CvReport report{resolve(spec), {}, 0.0, seed};
    const auto splits = make_splits(data, options, seed);
    const std::string id = report.spec.id();
    for (std::size_t f = 0; f < splits.size(); ++f) {
        const Dataset train_set = data.subset(splits[f].train);
        const Dataset test_set = data.subset(splits[f].test);
        const auto model = train(report.spec, train_set, derive_seed(seed, id, f));
        report.fold_hit_rates.push_back(hit_rate(model.predict_rows(test_set.features), test_set.labels));
    }
    report.mean_hit_rate = std::accumulate(report.fold_hit_rates.begin(), report.fold_hit_rates.end(), 0.0) /
                           static_cast<double>(report.fold_hit_rates.size());
    return report;
}

std::vector<ClassifierSpec> expand_grid(const ClassifierSpec& base, const Grid& grid) {
    const std::string& kind = base.kind;
    if (grid.empty()) throw DataError("empty hyperparameter grid for " + kind);
    std::vector<ClassifierSpec> out{base};
    for (const auto& [name, values] : grid) {
        if (values.empty()) throw DataError("grid entry '" + name + "' for " + kind + " has no values");
        std::vector<ClassifierSpec> next;
        next.reserve(out.size() * values.size());
        for (const auto& prefix : out) {
            for (double v : values) {
                auto s = prefix;
                s.params[name] = v;
                next.push_back(std::move(s));
            }
        }
        out = std::move(next);
    }
    return out;
}

GridSearchResult grid_search(const ClassifierSpec& base, const Grid& grid, const Dataset& data,
                             const CvOptions& options, std::uint64_t seed) {
    const auto points = expand_grid(base, grid);
    std::vector<CvReport> evaluated;
    evaluated.reserve(points.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        evaluated.push_back(cross_validate(points[i], data, options, seed));
        if (evaluated[i].mean_hit_rate > evaluated[best].mean_hit_rate) best = i;
    }
    const auto& winner = evaluated[best].spec;
    auto model = train(winner, data, derive_seed(seed, winner.id(), options.folds));
    return {winner, std::move(model), evaluated[best], std::move(evaluated)};
}

const std::map<std::string, Grid>& default_grids() {
    static const std::map<std::string, Grid> grids = {
        {std::string(kinds::lda), {{"shrinkage", {-1.0, 0.1, 0.5}}}},
        {std::string(kinds::ridge), {{"alpha", {0.1, 1.0, 10.0}}}},
        {std::string(kinds::logistic), {{"C", {0.1, 1.0, 10.0}}}},
        {std::string(kinds::knn), {{"n_neighbors", {5.0, 9.0, 15.0}}}},
        {std::string(kinds::random_forest), {{"max_depth", {3.0, 4.0, 5.0}}, {"n_estimators", {100.0, 200.0}}}},
        {std::string(kinds::gradient_boosting), {{"max_depth", {3.0, 4.0, 5.0}}, {"n_estimators", {100.0, 200.0}}}},
    };
    return grids;
}

} // namespace yieldcycle
