#include <algorithm>
#include <cmath>
#include "json.hpp"
#include <numeric>

#include "models.hpp"
#include "tree.hpp"
#include "yieldcycle/error.hpp"

namespace yieldcycle::detail {

namespace {

using nlohmann::json;

TreeParams tree_params(const Hyperparams& p, Eigen::Index n_features) {
    TreeParams t;
    t.max_depth = int_param(p, "max_depth");
    t.min_samples_split = int_param(p, "min_samples_split");
    t.min_samples_leaf = int_param(p, "min_samples_leaf");
    t.max_features = int_param(p, "max_features");
    if (t.max_features <= 0) {
        t.max_features = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_features)))));
    }
    return t;
}

void validate_tree_params(const Hyperparams& p, std::string_view kind) {
    const std::string k(kind);
    if (int_param(p, "n_estimators") < 1) throw DataError(k + " n_estimators must be >= 1");
    if (int_param(p, "max_depth") < 1) throw DataError(k + " max_depth must be >= 1");
    if (int_param(p, "min_samples_split") < 2) throw DataError(k + " min_samples_split must be >= 2");
    if (int_param(p, "min_samples_leaf") < 1) throw DataError(k + " min_samples_leaf must be >= 1");
}

void check_two_classes(std::span<const int> y, std::string_view kind) {
    const bool pos = std::find(y.begin(), y.end(), 1) != y.end();
    const bool neg = std::find(y.begin(), y.end(), -1) != y.end();
    if (!(pos && neg)) throw DataError(std::string(kind) + " needs both classes in the training data");
}

/// Bagged Gini trees; decision = mean leaf P(+1) - 0.5.
class RandomForestModel final : public Model {
public:
    RandomForestModel(std::vector<Tree> trees, std::vector<double> importance)
        : trees_(std::move(trees)), importance_(std::move(importance)) {}

    double decision(std::span<const double> x) const override {
        double p = 0.0;
        for (const auto& t : trees_) p += t.predict(x);
        return p / static_cast<double>(trees_.size()) - 0.5;
    }

    std::string save() const override {
        return json{{"trees", json::parse(trees_to_json(trees_))}, {"importance", importance_}}.dump();
    }

    std::optional<std::vector<double>> impurity_importance() const override { return importance_; }

    static std::unique_ptr<Model> load(std::string_view text) {
        const auto j = json::parse(text);
        return std::make_unique<RandomForestModel>(trees_from_json(j.at("trees").dump()),
                                                   j.at("importance").get<std::vector<double>>());
    }

private:
    std::vector<Tree> trees_;
    std::vector<double> importance_;
};

std::unique_ptr<Model> train_forest(const Eigen::MatrixXd& X, std::span<const int> y, const Hyperparams& p,
                                    std::uint64_t seed) {
    check_two_classes(y, kinds::random_forest);
    const auto params = tree_params(p, X.cols());
    const int n_estimators = int_param(p, "n_estimators");
    const bool bootstrap = param(p, "bootstrap") != 0.0;
    const auto n = static_cast<std::size_t>(X.rows());

    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) target[i] = y[i] > 0 ? 1.0 : 0.0;
    const LeafValue leaf = [&](std::span<const std::size_t> rows) {
        double s = 0.0;
        for (auto r : rows) s += target[r];
        return s / static_cast<double>(rows.size());
    };

    Rng rng(seed);
    std::vector<double> importance(static_cast<std::size_t>(X.cols()), 0.0);
    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(n_estimators));
    for (int t = 0; t < n_estimators; ++t) {
        std::vector<std::size_t> rows(n);
        if (bootstrap) {
            for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform_index(n));
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        trees.push_back(grow_tree(X, target, std::move(rows), SplitCriterion::gini, params, rng, leaf, importance));
    }
    return std::make_unique<RandomForestModel>(std::move(trees), std::move(importance));
}

/// Gradient boosting on the binomial deviance; decision = log-odds F(x).
class GradientBoostingModel final : public Model {
public:
    GradientBoostingModel(double init, double learning_rate, std::vector<Tree> trees, std::vector<double> importance)
        : init_(init), learning_rate_(learning_rate), trees_(std::move(trees)), importance_(std::move(importance)) {}

    double decision(std::span<const double> x) const override {
        double f = init_;
        for (const auto& t : trees_) f += learning_rate_ * t.predict(x);
        return f;
    }

    std::string save() const override {
        return json{{"init", init_},
                    {"learning_rate", learning_rate_},
                    {"trees", json::parse(trees_to_json(trees_))},
                    {"importance", importance_}}
            .dump();
    }

    std::optional<std::vector<double>> impurity_importance() const override { return importance_; }

    static std::unique_ptr<Model> load(std::string_view text) {
        const auto j = json::parse(text);
        return std::make_unique<GradientBoostingModel>(j.at("init").get<double>(), j.at("learning_rate").get<double>(),
                                                       trees_from_json(j.at("trees").dump()),
                                                       j.at("importance").get<std::vector<double>>());
    }

private:
    double init_;
    double learning_rate_;
    std::vector<Tree> trees_;
    std::vector<double> importance_;
};

std::unique_ptr<Model> train_boosting(const Eigen::MatrixXd& X, std::span<const int> y, const Hyperparams& p,
                                      std::uint64_t seed) {
    check_two_classes(y, kinds::gradient_boosting);
    const auto params = tree_params(p, X.cols());
    const int n_estimators = int_param(p, "n_estimators");
    const double learning_rate = param(p, "learning_rate");
    const double subsample = param(p, "subsample");
    const auto n = static_cast<std::size_t>(X.rows());

    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Xr = X;
    std::vector<double> y01(n);
    double pos = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y01[i] = y[i] > 0 ? 1.0 : 0.0;
        pos += y01[i];
    }
    const double prior = pos / static_cast<double>(n);
    const double init = std::log(prior / (1.0 - prior));

    std::vector<double> score(n, init);
    std::vector<double> prob(n);
    std::vector<double> residual(n);
    // One Newton step on the deviance inside each leaf.
    const LeafValue leaf = [&](std::span<const std::size_t> rows) {
        double num = 0.0;
        double den = 0.0;
        for (auto r : rows) {
            num += residual[r];
            den += prob[r] * (1.0 - prob[r]);
        }
        if (den < 1e-150) return 0.0;
        return num / den;
    };

    Rng rng(seed);
    std::vector<double> importance(static_cast<std::size_t>(X.cols()), 0.0);
    std::vector<Tree> trees;
    trees.reserve(static_cast<std::size_t>(n_estimators));
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (int t = 0; t < n_estimators; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = 1.0 / (1.0 + std::exp(-score[i]));
            residual[i] = y01[i] - prob[i];
        }
        std::vector<std::size_t> rows = all;
        if (subsample < 1.0) {
            rng.shuffle(std::span<std::size_t>(rows));
            rows.resize(std::max<std::size_t>(1, static_cast<std::size_t>(subsample * static_cast<double>(n))));
            std::sort(rows.begin(), rows.end());
        }
        Tree tree = grow_tree(X, residual, std::move(rows), SplitCriterion::squared_error, params, rng, leaf, importance);
        for (std::size_t i = 0; i < n; ++i) {
            score[i] += learning_rate * tree.predict(std::span<const double>(
                                            Xr.data() + i * static_cast<std::size_t>(X.cols()),
                                            static_cast<std::size_t>(X.cols())));
        }
        trees.push_back(std::move(tree));
    }
    return std::make_unique<GradientBoostingModel>(init, learning_rate, std::move(trees), std::move(importance));
}

} // namespace

ClassifierKind random_forest_kind() {
    return {std::string(kinds::random_forest),
            {{"n_estimators", 200},
             {"max_depth", 4},
             {"min_samples_split", 5},
             {"min_samples_leaf", 3},
             {"max_features", 0},
             {"bootstrap", 1}},
            train_forest,
            RandomForestModel::load,
            [](const Hyperparams& p) { validate_tree_params(p, kinds::random_forest); },
            false};
}

ClassifierKind gradient_boosting_kind() {
    return {std::string(kinds::gradient_boosting),
            {{"n_estimators", 200},
             {"learning_rate", 0.1},
             {"max_depth", 4},
             {"min_samples_split", 5},
             {"min_samples_leaf", 3},
             {"max_features", 0},
             {"subsample", 1.0}},
            train_boosting,
            GradientBoostingModel::load,
            [](const Hyperparams& p) {
                validate_tree_params(p, kinds::gradient_boosting);
                if (!(param(p, "learning_rate") > 0.0)) throw DataError("GradientBoosting learning_rate must be > 0");
                const double s = param(p, "subsample");
                if (!(s > 0.0 && s <= 1.0)) throw DataError("GradientBoosting subsample must be in (0, 1]");
            },
            false};
}

} // namespace yieldcycle::detail
