#pragma once

// Synthetic multi-country corpus with a known answer: the direction of next
// month's yield change is the sign of a fixed linear combination of a few ASG
// features (shared by every country), with a small fraction of labels flipped.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "yieldcycle/asg.hpp"
#include "yieldcycle/cycles.hpp"
#include "yieldcycle/series.hpp"

namespace yieldcycle {

struct SyntheticOptions {
    std::vector<std::string> countries = {"UK", "GRM", "JPN", "AUS", "CND"};
    std::string target = "US";
    Month start{1980, 1};
    int months = 450;
    std::uint64_t seed = 7;
    double flip_rate = 0.05;
    int calendar_jitter = 3; // +- months applied to each turning point
    /// Feature name -> weight. Names must be level/change features of codes
    /// other than MP4.
    std::vector<std::pair<std::string, double>> signal = {{"FF1_L", 1.0}, {"MP1_C", -0.8}, {"I2_L", 0.6}};
    AsgParams asg;
};

struct SyntheticCountry {
    std::string country;
    std::vector<IndicatorSeries> indicators; // kAsgCodes order
    BusinessCycleCalendar calendar;
    std::vector<int> planted_labels; // direction of each month's next move; last entry is 0
};

/// Deterministic in (options, country).
SyntheticCountry generate_country(const SyntheticOptions& options, const std::string& country);

/// Writes `{COUNTRY}_{CODE}.csv`, `{COUNTRY}_cycles.csv` for the training
/// countries and the target, plus `config.json` pointing at them. Returns the
/// file names written.
std::vector<std::string> write_synthetic_corpus(const std::filesystem::path& dir, const SyntheticOptions& options);

} // namespace yieldcycle
