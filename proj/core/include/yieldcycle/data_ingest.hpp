#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "yieldcycle/asg.hpp"
#include "yieldcycle/cycles.hpp"
#include "yieldcycle/series.hpp"

namespace yieldcycle {

/// Reads a `month,value` file. Rows may appear in any order; the result is
/// sorted. Duplicate months, gaps, unparsable or non-finite values are
/// DataErrors that name the offending row. Rows outside `range` (when given)
/// are ignored.
IndicatorSeries load_indicator_csv(const std::filesystem::path& path, std::string country, IndicatorCode code,
                                   std::optional<MonthRange> range = std::nullopt);

/// `{COUNTRY}_{CODE}.csv` inside `data_dir`.
std::filesystem::path indicator_path(const std::filesystem::path& data_dir, const std::string& country,
                                     IndicatorCode code);

/// Direction of the next-month yield change: label at t is sign(y[t+1] - y[t]).
/// Zero changes and the last month carry no label. Labels are +1 or -1.
struct LabelSeries {
    std::string country;
    std::vector<Month> months;
    std::vector<int> labels;

    std::size_t size() const { return months.size(); }
};

LabelSeries build_labels(const IndicatorSeries& yield_series);

struct FeatureColumn {
    std::string name;
    std::vector<double> values;
};

/// Every ASG feature plus the calendar month, on a common month index.
struct AlignedPanel {
    std::string country;
    std::vector<Month> months;
    std::vector<FeatureColumn> columns;

    std::optional<std::size_t> row_of(Month m) const;
};

/// Feature names in column order: FF1_L, FF1_C, GM1_L, ..., MP4_C, O1.
const std::vector<std::string>& all_feature_names();
std::string level_feature_name(IndicatorCode code);
std::string change_feature_name(IndicatorCode code);

/// Builds the 17-column panel from the ASG output of all eight codes. The
/// month index is the intersection of the codes' final-feature months.
AlignedPanel build_panel(const std::string& country, std::span<const AsgFeaturePair> pairs);

enum class FeaturePreset { full, feature_extraction, excl_mp4, base };

FeaturePreset parse_feature_preset(std::string_view text);
std::string_view to_string(FeaturePreset preset);
/// Feature columns used by a preset, in panel order.
std::vector<std::string> preset_features(FeaturePreset preset);

struct Provenance {
    std::string country;
    std::optional<Cycle> cycle;

    std::string to_string() const;
};

/// Labeled rows of one (country, cycle) subset.
struct Dataset {
    Provenance provenance;
    std::vector<std::string> feature_names;
    std::vector<Month> months;
    Eigen::MatrixXd features; // rows x feature_names.size()
    std::vector<int> labels;  // +1 / -1

    std::size_t rows() const { return labels.size(); }
    std::size_t cols() const { return feature_names.size(); }
    std::size_t count(int label) const;

    /// Row count >= 1, matching shapes, finite features, +-1 labels, months
    /// strictly increasing. Throws DataError.
    void validate() const;

    /// Rows at `indices` (must be ascending to keep months increasing).
    Dataset subset(std::span<const std::size_t> indices) const;
    /// Columns named in `names`, in that order.
    Dataset select_features(std::span<const std::string> names) const;

    /// Build from bare arrays; months are assigned consecutively from 2000-01.
    static Dataset from_arrays(Eigen::MatrixXd features, std::vector<int> labels,
                               std::vector<std::string> feature_names = {}, Provenance provenance = {});
};

struct AssemblyDiagnostics {
    std::string country;
    std::size_t labeled_months = 0;
    std::size_t dropped_outside_cycles = 0;
    std::size_t dropped_without_features = 0;
    std::map<Cycle, std::size_t> rows_per_cycle;
    std::vector<std::string> warnings;

    std::size_t dropped() const { return dropped_outside_cycles + dropped_without_features; }
    std::string to_json() const;
};

struct CycleDatasets {
    /// Only cycles that received at least one row.
    std::map<Cycle, Dataset> datasets;
    AssemblyDiagnostics diagnostics;
};

/// Routes every labeled month to its cycle dataset. Labeled months the
/// partition leaves unlabeled, and labeled months before the panel has
/// features (the ASG warm-up), are dropped and counted.
CycleDatasets assemble_datasets(const AlignedPanel& panel, const LabelSeries& labels,
                                const CyclePartition& partition);

/// `# country=..,cycle=..` line, then `month,<features...>,label`. Values use the
/// shortest round-trip representation, so reading back is bit-exact.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);

} // namespace yieldcycle
