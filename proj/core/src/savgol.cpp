#include "yieldcycle/savgol.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "yieldcycle/error.hpp"

namespace yieldcycle {

namespace {

void check_params(int window, int order) {
    if (window < 1 || window % 2 == 0) throw DataError("Sav-Gol window must be odd and positive, got " + std::to_string(window));
    if (order < 0 || order >= window) {
        throw DataError("Sav-Gol order must be in [0, window), got order " + std::to_string(order) + " for window " +
                        std::to_string(window));
    }
}

} // namespace

std::vector<double> savgol_coefficients(int window, int order, int position) {
    check_params(window, order);
    const int half = window / 2;
    if (position < -half || position > half) throw DataError("Sav-Gol evaluation position outside the window");

    // Design matrix on centered offsets; the weights are a_pos^T (A^T A)^-1 A^T,
    // i.e. the row of the hat map that evaluates the fit at `position`.
    Eigen::MatrixXd design(window, order + 1);
    for (int i = -half; i <= half; ++i) {
        double p = 1.0;
        for (int j = 0; j <= order; ++j) {
            design(i + half, j) = p;
            p *= i;
        }
    }
    Eigen::VectorXd eval(order + 1);
    double p = 1.0;
    for (int j = 0; j <= order; ++j) {
        eval(j) = p;
        p *= position;
    }
    const Eigen::MatrixXd gram = design.transpose() * design;
    const Eigen::VectorXd solved = gram.ldlt().solve(eval);
    const Eigen::VectorXd weights = design * solved;
    return {weights.data(), weights.data() + weights.size()};
}

std::vector<double> savgol_filter(std::span<const double> series, int window, int order, SavgolEdge edge) {
    check_params(window, order);
    const auto n = series.size();
    if (n < static_cast<std::size_t>(window)) {
        throw DataError("series of length " + std::to_string(n) + " is shorter than the Sav-Gol window " +
                        std::to_string(window));
    }
    // order + 1 >= window: the fit interpolates every point of the window.
    if (order + 1 >= window) return {series.begin(), series.end()};

    const int half = window / 2;
    const auto center = savgol_coefficients(window, order, 0);
    std::vector<double> out(n, 0.0);
    const auto sn = static_cast<long>(n);

    auto mirrored = [&](long i) {
        if (i < 0) i = -i;
        if (i >= sn) i = 2 * (sn - 1) - i;
        return series[static_cast<std::size_t>(i)];
    };

    for (long t = 0; t < sn; ++t) {
        const bool interior = t >= half && t + half < sn;
        if (interior || edge == SavgolEdge::mirror) {
            double acc = 0.0;
            for (int j = -half; j <= half; ++j) {
                acc += center[static_cast<std::size_t>(j + half)] * (interior ? series[static_cast<std::size_t>(t + j)] : mirrored(t + j));
            }
            out[static_cast<std::size_t>(t)] = acc;
            continue;
        }
        // Edge point: evaluate the fit of the nearest full window at this offset.
        const long window_center = (t < half) ? half : sn - 1 - half;
        const auto weights = savgol_coefficients(window, order, static_cast<int>(t - window_center));
        double acc = 0.0;
        for (int j = -half; j <= half; ++j) {
            acc += weights[static_cast<std::size_t>(j + half)] * series[static_cast<std::size_t>(window_center + j)];
        }
        out[static_cast<std::size_t>(t)] = acc;
    }
    return out;
}

} // namespace yieldcycle
