#pragma once

#include <span>
#include <vector>

namespace yieldcycle {

/// How the first and last `window / 2` points are smoothed.
enum class SavgolEdge {
    /// Fit the polynomial to the first (last) full window and evaluate it at
    /// the edge positions. Polynomials of degree <= order are reproduced exactly.
    interpolate,
    /// Reflect the series about its end points (x[-k] = x[k]) and apply the
    /// centered filter everywhere.
    mirror,
};

/// Least-squares weights that evaluate the degree-`order` fit over a window
/// of `window` points at offset `position` from the window center
/// (position in [-window/2, window/2]).
std::vector<double> savgol_coefficients(int window, int order, int position);

/// Savitzky-Golay smoothing. Output has the same length as the input.
/// Requires odd `window`, 0 <= order < window and series.size() >= window.
std::vector<double> savgol_filter(std::span<const double> series, int window, int order,
                                  SavgolEdge edge = SavgolEdge::interpolate);

} // namespace yieldcycle
