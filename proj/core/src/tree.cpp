#include "tree.hpp"

#include <algorithm>
#include "json.hpp"
#include <numeric>

namespace yieldcycle::detail {

double Tree::predict(std::span<const double> x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

namespace {

/// Impurity times sample count: n * gini for 0/1 targets, SSE otherwise.
double weighted_impurity(SplitCriterion c, double n, double sum, double sum_sq) {
    if (n <= 0) return 0.0;
    if (c == SplitCriterion::gini) {
        const double p = sum / n;
        return n * 2.0 * p * (1.0 - p);
    }
    return std::max(0.0, sum_sq - sum * sum / n);
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;
};

class Grower {
public:
    Grower(const Eigen::MatrixXd& X, std::span<const double> target, SplitCriterion criterion, const TreeParams& params,
           Rng& rng, const LeafValue& leaf_value, std::vector<double>& importance)
        : X_(X), target_(target), criterion_(criterion), params_(params), rng_(rng), leaf_value_(leaf_value),
          importance_(importance) {}

    int grow(std::vector<std::size_t> rows, int depth) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        double sum = 0.0;
        double sum_sq = 0.0;
        for (auto r : rows) {
            sum += target_[r];
            sum_sq += target_[r] * target_[r];
        }
        const double n = static_cast<double>(rows.size());
        const double impurity = weighted_impurity(criterion_, n, sum, sum_sq);

        Split best;
        if (depth < params_.max_depth && static_cast<int>(rows.size()) >= params_.min_samples_split && impurity > 1e-12) {
            best = find_split(rows, impurity);
        }
        if (best.feature < 0) {
            tree.nodes[static_cast<std::size_t>(id)].value = leaf_value_(rows);
            return id;
        }

        importance_[static_cast<std::size_t>(best.feature)] += best.decrease;
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) (X_(static_cast<Eigen::Index>(r), best.feature) <= best.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    Tree tree;

private:
    Split find_split(const std::vector<std::size_t>& rows, double parent_impurity) {
        const int p = static_cast<int>(X_.cols());
        const int wanted = params_.max_features > 0 ? std::min(params_.max_features, p) : p;
        std::vector<int> order(static_cast<std::size_t>(p));
        std::iota(order.begin(), order.end(), 0);
        rng_.shuffle(std::span<int>(order));

        Split best;
        const auto min_leaf = static_cast<std::size_t>(std::max(params_.min_samples_leaf, 1));
        std::vector<std::pair<double, double>> column(rows.size()); // (feature value, target)
        int examined = 0;
        for (int f : order) {
            // Keep drawing features past the quota until some split is valid.
            if (examined >= wanted && best.feature >= 0) break;
            ++examined;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                column[i] = {X_(static_cast<Eigen::Index>(rows[i]), f), target_[rows[i]]};
            }
            std::sort(column.begin(), column.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            if (column.front().first == column.back().first) continue;

            double total = 0.0;
            double total_sq = 0.0;
            for (const auto& [v, t] : column) {
                total += t;
                total_sq += t * t;
            }
            double left_sum = 0.0;
            double left_sq = 0.0;
            const auto n = column.size();
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_sum += column[i].second;
                left_sq += column[i].second * column[i].second;
                const std::size_t n_left = i + 1;
                if (column[i].first == column[i + 1].first) continue;
                if (n_left < min_leaf || n - n_left < min_leaf) continue;
                const double child = weighted_impurity(criterion_, static_cast<double>(n_left), left_sum, left_sq) +
                                     weighted_impurity(criterion_, static_cast<double>(n - n_left), total - left_sum,
                                                       total_sq - left_sq);
                const double decrease = parent_impurity - child;
                if (decrease > best.decrease + 1e-12 || (best.feature < 0 && decrease > 0.0)) {
                    best.feature = f;
                    best.decrease = decrease;
                    best.threshold = 0.5 * (column[i].first + column[i + 1].first);
                    // Guard against the midpoint rounding onto the upper value.
                    if (best.threshold >= column[i + 1].first) best.threshold = column[i].first;
                }
            }
        }
        return best;
    }

    const Eigen::MatrixXd& X_;
    std::span<const double> target_;
    SplitCriterion criterion_;
    const TreeParams& params_;
    Rng& rng_;
    const LeafValue& leaf_value_;
    std::vector<double>& importance_;
};

} // namespace

Tree grow_tree(const Eigen::MatrixXd& X, std::span<const double> target, std::vector<std::size_t> rows,
               SplitCriterion criterion, const TreeParams& params, Rng& rng, const LeafValue& leaf_value,
               std::vector<double>& importance) {
    Grower g(X, target, criterion, params, rng, leaf_value, importance);
    g.grow(std::move(rows), 0);
    return std::move(g.tree);
}

std::string trees_to_json(const std::vector<Tree>& trees) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : trees) {
        nlohmann::json feature = nlohmann::json::array(), threshold = nlohmann::json::array(),
                       left = nlohmann::json::array(), right = nlohmann::json::array(), value = nlohmann::json::array();
        for (const auto& n : t.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            value.push_back(n.value);
        }
        out.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}});
    }
    return out.dump();
}

std::vector<Tree> trees_from_json(const std::string& json_array) {
    std::vector<Tree> trees;
    for (const auto& j : nlohmann::json::parse(json_array)) {
        Tree t;
        const auto feature = j.at("feature").get<std::vector<int>>();
        const auto threshold = j.at("threshold").get<std::vector<double>>();
        const auto left = j.at("left").get<std::vector<int>>();
        const auto right = j.at("right").get<std::vector<int>>();
        const auto value = j.at("value").get<std::vector<double>>();
        for (std::size_t i = 0; i < feature.size(); ++i) t.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
        trees.push_back(std::move(t));
    }
    return trees;
}

} // namespace yieldcycle::detail
