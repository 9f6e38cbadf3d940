#include "yieldcycle/mic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "yieldcycle/error.hpp"

namespace yieldcycle {

namespace {

std::vector<std::size_t> argsort(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    return idx;
}

/// Splits sorted values into about `bins` consecutive groups of equal size,
/// never separating equal values. Returns the group of each position.
std::vector<int> equipartition(std::span<const double> sorted, int bins, int& groups) {
    const std::size_t n = sorted.size();
    std::vector<int> group(n);
    double target = static_cast<double>(n) / bins;
    std::size_t i = 0;
    std::size_t filled = 0;
    int current = 0;
    while (i < n) {
        std::size_t run = 1;
        while (i + run < n && sorted[i + run] == sorted[i]) ++run;
        const double with = std::abs(static_cast<double>(filled + run) - target);
        const double without = std::abs(static_cast<double>(filled) - target);
        if (filled != 0 && with >= without) {
            ++current;
            filled = 0;
            target = static_cast<double>(n - i) / (bins - current);
        }
        for (std::size_t j = 0; j < run; ++j) group[i + j] = current;
        i += run;
        filled += run;
    }
    groups = current + 1;
    return group;
}

/// Clumps along sorted x: maximal runs with one row label, where a run of tied
/// x values spanning several rows becomes its own clump.
std::vector<int> clumps(std::span<const double> xs, std::span<const int> rows, int& count) {
    const std::size_t n = xs.size();
    std::vector<int> key(rows.begin(), rows.end());
    int tie_key = -1;
    for (std::size_t i = 0; i < n;) {
        std::size_t run = 1;
        bool mixed = false;
        while (i + run < n && xs[i + run] == xs[i]) {
            mixed = mixed || rows[i + run] != rows[i];
            ++run;
        }
        if (run > 1 && mixed) {
            for (std::size_t j = 0; j < run; ++j) key[i + j] = tie_key;
            --tie_key;
        }
        i += run;
    }
    std::vector<int> out(n);
    int c = 0;
    for (std::size_t j = 1; j < n; ++j) {
        if (key[j] != key[j - 1]) ++c;
        out[j] = c;
    }
    count = n == 0 ? 0 : c + 1;
    return out;
}

/// Best normalized mutual information for each column count 2..max_cols, given
/// row labels `rows` and column blocks `blocks` (both in x order). Returns the
/// maximum over column counts.
double best_normalized_mi(std::span<const int> rows, int q, std::span<const int> blocks, int p, int max_cols) {
    if (p < 2 || q < 2) return 0.0;
    const std::size_t n = rows.size();
    // cum[t][r]: points with row r among the first t blocks.
    std::vector<std::vector<int>> cum(static_cast<std::size_t>(p) + 1, std::vector<int>(static_cast<std::size_t>(q), 0));
    for (std::size_t k = 0; k < n; ++k) ++cum[static_cast<std::size_t>(blocks[k]) + 1][static_cast<std::size_t>(rows[k])];
    for (int t = 1; t <= p; ++t) {
        for (int r = 0; r < q; ++r) cum[t][r] += cum[t - 1][r];
    }
    auto xlogx = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
    // cost(s, t): count-weighted entropy of the rows inside blocks s+1..t.
    auto cost = [&](int s, int t) {
        double total = 0.0;
        double acc = 0.0;
        for (int r = 0; r < q; ++r) {
            const double c = cum[t][r] - cum[s][r];
            total += c;
            acc += xlogx(c);
        }
        return xlogx(total) - acc;
    };
    double hq = 0.0;
    for (int r = 0; r < q; ++r) {
        const double pr = static_cast<double>(cum[p][r]) / static_cast<double>(n);
        if (pr > 0.0) hq -= pr * std::log(pr);
    }
    std::vector<std::vector<double>> w(static_cast<std::size_t>(p) + 1, std::vector<double>(static_cast<std::size_t>(p) + 1, 0.0));
    for (int s = 0; s < p; ++s) {
        for (int t = s + 1; t <= p; ++t) w[s][t] = cost(s, t);
    }
    // g[t]: least total cost of splitting the first t blocks into at most l columns.
    std::vector<double> g(static_cast<std::size_t>(p) + 1);
    for (int t = 0; t <= p; ++t) g[t] = w[0][t];
    double best = 0.0;
    const double log_q = std::log(static_cast<double>(q));
    for (int l = 2; l <= max_cols; ++l) {
        std::vector<double> next = g;
        for (int t = 2; t <= p; ++t) {
            for (int s = 1; s < t; ++s) next[t] = std::min(next[t], g[s] + w[s][t]);
        }
        g = std::move(next);
        const double mi = hq - g[p] / static_cast<double>(n);
        best = std::max(best, mi / std::min(std::log(static_cast<double>(l)), log_q));
    }
    return best;
}

double one_orientation(std::span<const double> x, std::span<const double> y, double budget, double clump_factor) {
    const std::size_t n = x.size();
    const auto ix = argsort(x);
    const auto iy = argsort(y);
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t k = 0; k < n; ++k) {
        xs[k] = x[ix[k]];
        ys[k] = y[iy[k]];
    }
    double best = 0.0;
    const int max_rows = std::max(static_cast<int>(std::floor(budget / 2.0)), 2);
    std::vector<int> row_of(n);
    std::vector<int> rows_x(n);
    for (int y_bins = 2; y_bins <= max_rows; ++y_bins) {
        const int max_cols = static_cast<int>(std::floor(budget / y_bins));
        if (max_cols < 2) continue;
        int q = 0;
        const auto by_y = equipartition(ys, y_bins, q);
        for (std::size_t k = 0; k < n; ++k) row_of[iy[k]] = by_y[k];
        for (std::size_t k = 0; k < n; ++k) rows_x[k] = row_of[ix[k]];

        int p = 0;
        auto blocks = clumps(xs, rows_x, p);
        const int k_hat = std::max(static_cast<int>(clump_factor * max_cols), 1);
        if (p > k_hat) {
            std::vector<double> as_values(blocks.begin(), blocks.end());
            blocks = equipartition(as_values, k_hat, p);
        }
        best = std::max(best, best_normalized_mi(rows_x, q, blocks, p, max_cols));
    }
    return best;
}

} // namespace

double mic(std::span<const double> x, std::span<const double> y, const MicOptions& options) {
    if (x.size() != y.size()) throw DataError("mic needs equally long inputs");
    if (x.size() < 25) throw DataError("mic needs at least 25 points");
    if (!(options.alpha > 0.0 && options.alpha <= 1.0)) throw DataError("mic alpha must be in (0, 1]");
    if (!(options.clump_factor > 0.0)) throw DataError("mic clump factor must be positive");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DataError("mic inputs must be finite");
    }
    auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; });
    };
    if (constant(x) || constant(y)) return 0.0;
    const double budget = std::max(std::pow(static_cast<double>(x.size()), options.alpha), 4.0);
    const double m = std::max(one_orientation(x, y, budget, options.clump_factor),
                              one_orientation(y, x, budget, options.clump_factor));
    return std::clamp(m, 0.0, 1.0);
}

} // namespace yieldcycle
