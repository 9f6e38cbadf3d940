#include "yieldcycle/asg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "csv.hpp"
#include "yieldcycle/error.hpp"

namespace yieldcycle {

void AsgParams::validate() const {
    if (window < 2) throw DataError("ASG window must be >= 2, got " + std::to_string(window));
    if (!(cap > 0.0) || !std::isfinite(cap)) throw DataError("ASG cap must be positive");
    if (sg_window < 1 || sg_window % 2 == 0) {
        throw DataError("ASG sg_window must be odd and positive, got " + std::to_string(sg_window));
    }
    if (sg_order < 0 || sg_order >= sg_window) throw DataError("ASG sg_order must be in [0, sg_window)");
}

Series rolling_standardize(const Series& series, int window, StandardizeMode mode) {
    if (window < 2) throw DataError("standardization window must be >= 2");
    Series base;
    if (mode == StandardizeMode::level) {
        base = series;
    } else {
        if (series.size() < 2) throw DataError("change mode needs at least 2 values");
        base.start = series.start + 1;
        base.values.resize(series.size() - 1);
        for (std::size_t i = 1; i < series.size(); ++i) base.values[i - 1] = series.values[i] - series.values[i - 1];
    }
    const auto w = static_cast<std::size_t>(window);
    if (base.size() <= w) {
        throw DataError("series of length " + std::to_string(series.size()) + " is too short for a " +
                        std::to_string(window) + "-month trailing window" +
                        (mode == StandardizeMode::change ? " in change mode" : ""));
    }

    Series out{base.start + window, std::vector<double>(base.size() - w)};
    for (std::size_t t = w; t < base.size(); ++t) {
        const auto first = base.values.begin() + static_cast<long>(t - w);
        const auto last = base.values.begin() + static_cast<long>(t);
        const double mean = std::accumulate(first, last, 0.0) / static_cast<double>(w);
        double ss = 0.0;
        for (auto it = first; it != last; ++it) ss += (*it - mean) * (*it - mean);
        const double sd = std::sqrt(ss / static_cast<double>(w - 1));
        if (!(sd > 0.0)) {
            throw DataError("zero standard deviation in the trailing window before " + base.month_at(t).to_string() +
                            (mode == StandardizeMode::change ? " (change mode)" : " (level mode)"));
        }
        out.values[t - w] = (base.values[t] - mean) / sd;
    }
    return out;
}

OutlierReplacement replace_outliers(std::span<const double> values, double cap) {
    if (values.empty()) throw DataError("outlier replacement on an empty series");
    if (!(cap > 0.0)) throw DataError("outlier cap must be positive");
    double largest_inside = -1.0;
    for (double v : values) {
        if (std::abs(v) <= cap) largest_inside = std::max(largest_inside, std::abs(v));
    }
    if (largest_inside < 0.0) throw DataError("every value exceeds the outlier cap of " + csv::format_double(cap));

    OutlierReplacement out{{values.begin(), values.end()}, 0, largest_inside};
    for (double& v : out.values) {
        if (std::abs(v) > cap) {
            v = std::copysign(largest_inside, v);
            ++out.replaced;
        }
    }
    return out;
}

NonnegativeShift shift_nonnegative(std::span<const double> values) {
    if (values.empty()) throw DataError("shift on an empty series");
    for (double v : values) {
        if (!std::isfinite(v)) throw DataError("non-finite value in shift input");
    }
    const double lo = *std::min_element(values.begin(), values.end());
    NonnegativeShift out{{values.begin(), values.end()}, lo};
    for (double& v : out.values) v -= lo;
    return out;
}

std::vector<std::int8_t> savgol_sign_change(std::span<const double> filtered) {
    std::vector<std::int8_t> out;
    if (filtered.size() < 2) return out;
    out.reserve(filtered.size() - 1);
    std::int8_t previous = 1;
    for (std::size_t t = 1; t < filtered.size(); ++t) {
        if (filtered[t] > filtered[t - 1]) {
            previous = 1;
        } else if (filtered[t] < filtered[t - 1]) {
            previous = -1;
        }
        out.push_back(previous);
    }
    return out;
}

namespace {

StageTrace run_pipeline(const Series& s1, const AsgParams& params) {
    if (s1.size() < static_cast<std::size_t>(std::max(params.sg_window, 2))) {
        throw DataError("standardized series of length " + std::to_string(s1.size()) +
                        " is too short for the Sav-Gol window " + std::to_string(params.sg_window));
    }
    // ds3 has no value at the first s1 month, so every stage is reported from
    // the second s1 month on. The filter still sees the whole s1 series.
    const std::span<const double> reported(s1.values.data() + 1, s1.values.size() - 1);
    const auto ex = replace_outliers(reported, params.cap);
    const auto shifted = shift_nonnegative(ex.values);
    const auto filtered = savgol_filter(s1.values, params.sg_window, params.sg_order, params.sg_edge);

    StageTrace trace;
    trace.start = s1.start + 1;
    trace.m_used = ex.replaced;
    trace.shift = shifted.shift;
    trace.s1.assign(reported.begin(), reported.end());
    trace.ex_out = ex.values;
    trace.s2 = shifted.values;
    trace.s3.assign(filtered.begin() + 1, filtered.end());
    trace.ds3 = savgol_sign_change(filtered);
    trace.final.resize(trace.ds3.size());
    // + 0.0 keeps a zero s2 from turning into -0 on a falling step.
    for (std::size_t i = 0; i < trace.final.size(); ++i) trace.final[i] = trace.s2[i] * trace.ds3[i] + 0.0;
    return trace;
}

std::string context(const IndicatorSeries& s) {
    return s.country + " " + std::string(to_string(s.code));
}

} // namespace

std::size_t asg_min_length(const AsgParams& params) {
    // change mode: 1 for differencing, window for the trailing window, then
    // the Sav-Gol window (at least 2 points for one ds3 value).
    return static_cast<std::size_t>(1 + params.window + std::max(params.sg_window, 2));
}

AsgFeaturePair asg_transform(const IndicatorSeries& series, const AsgParams& params) {
    params.validate();
    if (series.series.size() < asg_min_length(params)) {
        throw DataError(context(series) + ": ASG transform needs at least " + std::to_string(asg_min_length(params)) +
                        " months, got " + std::to_string(series.series.size()));
    }
    try {
        AsgFeaturePair pair;
        pair.code = series.code;
        pair.level = run_pipeline(rolling_standardize(series.series, params.window, StandardizeMode::level), params);
        pair.change = run_pipeline(rolling_standardize(series.series, params.window, StandardizeMode::change), params);
        return pair;
    } catch (const DataError& e) {
        throw DataError(context(series) + ": " + e.what());
    }
}

void write_trace_csv(std::ostream& out, const AsgFeaturePair& pair) {
    out << "pipeline,month,s1,ex_out,s2,s3,ds3,final\n";
    auto rows = [&](const StageTrace& t, const char* name) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            out << name << ',' << t.month_at(i).to_string() << ',' << csv::format_double(t.s1[i]) << ','
                << csv::format_double(t.ex_out[i]) << ',' << csv::format_double(t.s2[i]) << ','
                << csv::format_double(t.s3[i]) << ',' << static_cast<int>(t.ds3[i]) << ','
                << csv::format_double(t.final[i]) << '\n';
        }
    };
    rows(pair.level, "L");
    rows(pair.change, "C");
}

} // namespace yieldcycle
