#pragma once

// Pipeline configuration, read from one JSON file. Every key is optional
// except `countries` and `target_country`; see README for the schema.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "yieldcycle/asg.hpp"
#include "yieldcycle/classifier.hpp"
#include "yieldcycle/data_ingest.hpp"
#include "yieldcycle/mic.hpp"
#include "yieldcycle/validation.hpp"

namespace yieldcycle {

/// Overrides `output_dir` when set.
inline constexpr const char* kOutputDirEnv = "YIELDCYCLE_OUTPUT_DIR";

struct PipelineConfig {
    std::filesystem::path data_dir = ".";
    std::filesystem::path calendar_dir; // empty: same as data_dir
    std::filesystem::path output_dir = "out";
    std::vector<std::string> countries; // training countries
    std::string target_country = "US";
    MonthRange date_range{Month(1980, 1), Month(2017, 12)};
    AsgParams asg;
    CvOptions cv;
    std::uint64_t seed = 1;
    std::vector<ClassifierSpec> classifiers = default_specs();
    std::map<std::string, Grid> grids = default_grids();
    std::size_t level1_members = 3;
    std::size_t level2_members = 3;
    double threshold = 0.75;
    FeaturePreset feature_preset = FeaturePreset::full;
    double ttest_alpha = 0.10;
    MicOptions mic;

    /// Throws DataError naming the offending key.
    void validate() const;
    std::filesystem::path calendar_path(const std::string& country) const;
};

/// Relative paths in the file are resolved against the file's directory.
/// Applies the output-directory environment override, then validates.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = ".");

/// Canonical JSON of the effective configuration (used in reports).
std::string config_to_json(const PipelineConfig& config);

} // namespace yieldcycle
