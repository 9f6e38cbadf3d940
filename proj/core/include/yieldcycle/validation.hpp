#pragma once

// k-fold cross-validation and exhaustive grid search over one classifier kind.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "yieldcycle/classifier.hpp"

namespace yieldcycle {

/// Fraction of positions where the two label vectors agree. Sizes must match
/// and be non-zero.
double hit_rate(std::span<const int> predicted, std::span<const int> actual);

enum class CvMode {
    stratified,   // per-class shuffle, round-robin fold assignment
    walk_forward, // k+1 contiguous blocks; fold f trains on blocks 0..f, tests on f+1
};

CvMode parse_cv_mode(std::string_view text);
std::string_view to_string(CvMode mode);

struct CvOptions {
    int folds = 5;
    CvMode mode = CvMode::stratified;
};

struct CvReport {
    ClassifierSpec spec; // resolved
    std::vector<double> fold_hit_rates;
    double mean_hit_rate = 0.0;
    std::uint64_t seed = 0;
};

/// Held-out row indices (ascending) of each fold. Fold membership depends only
/// on the labels, k and seed, so every spec sees the same split.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

/// Throws DataError when k < 2 or a class has fewer than k rows (stratified),
/// or there are fewer than k + 1 rows (walk-forward). Training errors inside
/// a fold propagate.
CvReport cross_validate(const ClassifierSpec& spec, const Dataset& data, const CvOptions& options,
                        std::uint64_t seed);

/// Hyperparameter name -> candidate values.
using Grid = std::map<std::string, std::vector<double>>;

/// Cross product in a fixed order: names sorted, the first name varies
/// slowest, values in the order given. Grid values override `base.params`.
std::vector<ClassifierSpec> expand_grid(const ClassifierSpec& base, const Grid& grid);

struct GridSearchResult {
    ClassifierSpec best;
    TrainedModel model; // retrained on all rows with `best`
    CvReport report;    // report of `best`
    std::vector<CvReport> evaluated; // enumeration order
};

/// Highest mean CV hit rate wins; ties go to the earlier grid point.
GridSearchResult grid_search(const ClassifierSpec& base, const Grid& grid, const Dataset& data,
                             const CvOptions& options, std::uint64_t seed);

/// Built-in per-kind grids.
const std::map<std::string, Grid>& default_grids();

} // namespace yieldcycle
