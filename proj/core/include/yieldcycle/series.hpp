#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "yieldcycle/month.hpp"

namespace yieldcycle {

/// Indicator codes for the monthly macro-financial inputs.
enum class IndicatorCode {
    FF1, // nominal narrow effective exchange rate
    GM1, // NSA CPI
    GM2, // SA real GDP
    I1,  // capital formation / (real GDP - capital formation)
    I2,  // spread: govt 10Y vs BAA
    MP1, // spread: govt 10Y vs govt 5Y
    MP2, // main stock market level
    MP4, // 5Y government bond yield
    O1,  // calendar month (not transformed)
};

/// The eight codes that go through the ASG transform, in feature-column order.
inline constexpr std::array<IndicatorCode, 8> kAsgCodes = {
    IndicatorCode::FF1, IndicatorCode::GM1, IndicatorCode::GM2, IndicatorCode::I1,
    IndicatorCode::I2,  IndicatorCode::MP1, IndicatorCode::MP2, IndicatorCode::MP4,
};

std::string_view to_string(IndicatorCode code);
IndicatorCode parse_indicator_code(std::string_view text);

/// Values at consecutive months starting at `start`.
struct Series {
    Month start;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    Month month_at(std::size_t i) const { return start + static_cast<int>(i); }
    Month last() const { return start + (static_cast<int>(values.size()) - 1); }
    MonthRange range() const { return {start, last()}; }
    bool contains(Month m) const { return !empty() && start <= m && m <= last(); }
    double at(Month m) const { return values.at(static_cast<std::size_t>(m - start)); }
};

struct IndicatorSeries {
    std::string country;
    IndicatorCode code = IndicatorCode::FF1;
    Series series;
};

} // namespace yieldcycle
