#pragma once

// Paired one-tailed t-tests over per-country hit-rate matrices.

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "yieldcycle/cycles.hpp"

namespace yieldcycle {

struct TTestResult {
    std::vector<double> differences;
    double mean = 0.0;
    double std_error = 0.0;
    double t = 0.0;
    int df = 0;
    double alpha = 0.0;
    double critical_value = 0.0; // upper alpha quantile of t(df)
    bool significant = false;    // t > critical_value
};

/// H0: mean = 0 against H1: mean > 0. Throws DataError with fewer than two
/// differences or zero variance.
TTestResult paired_t_test(std::span<const double> differences, double alpha = 0.10);

/// Hit rates of one country's three level-1 ensembles (rows, by training
/// cycle) on the three target subsets (columns, by test cycle).
using HitMatrix = std::array<std::array<double, 3>, 3>;

struct HypothesisCell {
    Cycle appropriate; // training cycle matching the test cycle
    Cycle alternative;
    std::optional<TTestResult> result;
    std::string error; // set when the test could not be run
};

struct HypothesisMatrix {
    std::vector<std::string> countries;
    /// cells[i][j]: ensembles trained on cycle i vs cycle j, both scored on
    /// target cycle i. Diagonal cells are empty.
    std::array<std::array<std::optional<HypothesisCell>, 3>, 3> cells;
};

/// For each test cycle i and alternative j != i, differences across
/// countries of M[i][i] - M[j][i]. Per-cell failures are recorded, not thrown.
HypothesisMatrix cycle_hypothesis_matrix(const std::map<std::string, HitMatrix>& hit_matrices,
                                         double alpha = 0.10);

/// `appropriate,alternative,test_set,t,df,critical_value,significant`, one
/// row per off-diagonal cell in row-major order. Failed cells leave t empty.
void write_hypothesis_csv(std::ostream& out, const HypothesisMatrix& matrix);

} // namespace yieldcycle
