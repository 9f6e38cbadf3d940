#pragma once

// CART trees shared by the random forest (Gini on 0/1 targets) and gradient
// boosting (squared error on residuals).

#include <Eigen/Core>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "yieldcycle/random.hpp"

namespace yieldcycle::detail {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

class Tree {
public:
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const;
};

enum class SplitCriterion { gini, squared_error };

struct TreeParams {
    int max_depth = 4;
    int min_samples_split = 5;
    int min_samples_leaf = 3;
    int max_features = 0; // features examined per split; <= 0 means all
};

/// Value stored in a leaf, computed from the sample rows that reach it.
using LeafValue = std::function<double(std::span<const std::size_t> rows)>;

/// Grows a tree on `rows` (repeats allowed, as in a bootstrap sample).
/// `importance` (one slot per feature) receives the weighted impurity
/// decrease of every split, in sample-count units.
Tree grow_tree(const Eigen::MatrixXd& X, std::span<const double> target, std::vector<std::size_t> rows,
               SplitCriterion criterion, const TreeParams& params, Rng& rng, const LeafValue& leaf_value,
               std::vector<double>& importance);

std::string trees_to_json(const std::vector<Tree>& trees);
std::vector<Tree> trees_from_json(const std::string& json_array);

} // namespace yieldcycle::detail
