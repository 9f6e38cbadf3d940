#pragma once

// Maximal information coefficient, using the approximate search: one axis is
// equipartitioned, the other is optimized by dynamic programming over
// superclumps, and both orientations are tried.

#include <span>

namespace yieldcycle {

struct MicOptions {
    double alpha = 0.6;        // grid budget B(n) = max(n^alpha, 4)
    double clump_factor = 15;  // superclumps per column
};

/// In [0, 1]. At least 25 points are required; a constant input scores 0.
double mic(std::span<const double> x, std::span<const double> y, const MicOptions& options = {});

} // namespace yieldcycle
