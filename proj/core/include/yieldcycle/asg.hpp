#pragma once

// ASG transform (rolling z-score, then Savitzky-Golay trend sign). Turns one
// monthly indicator into a level feature and a change feature, each bounded by +/- 2 * cap.
//
//   s1     = trailing z-score of the value (level) or of the first difference (change)
//   ex_out = s1 with every |v| > cap replaced by sign(v) * (largest |v| <= cap)
//   s2     = ex_out - min(ex_out)
//   s3     = Sav-Gol fit of s1
//   ds3    = +1 / -1 direction of s3 from the previous month
//   final  = s2 * ds3
//
// The outlier cap and the shift are computed once over the whole reported
// series (every month that has a ds3 value), not over a rolling window.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "yieldcycle/savgol.hpp"
#include "yieldcycle/series.hpp"

namespace yieldcycle {

struct AsgParams {
    int window = 12;    // trailing standardization window, months
    double cap = 3.0;   // outlier cap on |s1|
    int sg_window = 3;  // odd
    int sg_order = 2;   // < sg_window
    SavgolEdge sg_edge = SavgolEdge::interpolate;

    void validate() const;
};

enum class StandardizeMode { level, change };

/// output_t = (v_t - mean(v_{t-w..t-1})) / sample_std(v_{t-w..t-1}), where v is
/// the series itself (level) or its first difference (change). Only months with
/// a full trailing window are present in the result.
Series rolling_standardize(const Series& series, int window, StandardizeMode mode);

struct OutlierReplacement {
    std::vector<double> values;
    int replaced = 0;         // M
    double replacement = 0.0; // largest |v| <= cap
};

OutlierReplacement replace_outliers(std::span<const double> values, double cap);

struct NonnegativeShift {
    std::vector<double> values;
    double shift = 0.0; // the subtracted minimum
};

NonnegativeShift shift_nonnegative(std::span<const double> values);

/// Direction of each step in `filtered`; one element shorter than the input.
/// A tie repeats the previous direction; a leading tie is +1.
std::vector<std::int8_t> savgol_sign_change(std::span<const double> filtered);

/// One pipeline (level or change) of the transform. All vectors share the
/// month index starting at `start`.
struct StageTrace {
    Month start;
    std::vector<double> s1;
    std::vector<double> ex_out;
    std::vector<double> s2;
    std::vector<double> s3;
    std::vector<std::int8_t> ds3;
    std::vector<double> final;
    int m_used = 0;
    double shift = 0.0;

    std::size_t size() const { return final.size(); }
    Month month_at(std::size_t i) const { return start + static_cast<int>(i); }
    Series final_series() const { return {start, final}; }
};

struct AsgFeaturePair {
    IndicatorCode code = IndicatorCode::FF1;
    StageTrace level;
    StageTrace change;
};

AsgFeaturePair asg_transform(const IndicatorSeries& series, const AsgParams& params = {});

/// Smallest raw series length that yields at least one change-feature value.
std::size_t asg_min_length(const AsgParams& params);

/// `pipeline,month,s1,ex_out,s2,s3,ds3,final`: the level rows (pipeline L),
/// then the change rows (pipeline C).
void write_trace_csv(std::ostream& out, const AsgFeaturePair& pair);

} // namespace yieldcycle
