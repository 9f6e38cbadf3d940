#pragma once

// Subcommands of the `yieldcycle` tool. Each cmd_* writes under the config's
// output directory and returns the written paths relative to it.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "yieldcycle/config.hpp"
#include "yieldcycle/synthetic.hpp"

namespace yieldcycle::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kInternalError = 2;

struct TransformOptions {
    std::vector<std::string> countries; // empty: training countries and target
    std::vector<std::string> codes;     // empty: all eight
};

std::vector<std::string> cmd_transform(const PipelineConfig& config, const TransformOptions& options);
std::vector<std::string> cmd_partition(const PipelineConfig& config, const std::vector<std::string>& countries,
                                       std::size_t jobs);
std::vector<std::string> cmd_run(const PipelineConfig& config, std::size_t jobs, std::ostream& out);

struct SweepOptions {
    std::vector<int> windows = {3, 5, 7, 9, 11, 13};
    std::vector<int> orders = {2, 3};
};

/// Mean CV hit rate over the training countries for every valid
/// (window, order), cycle and classifier. Invalid pairs are skipped and
/// listed in the notes file.
std::vector<std::string> cmd_sweep_savgol(const PipelineConfig& config, const SweepOptions& options,
                                          std::size_t jobs, std::ostream& out);

/// Cross-cycle t-tests from a `country,trained_on,MC1,MC2,MC3` file.
void cmd_ttest(const std::filesystem::path& input, double alpha, const std::filesystem::path& output,
               std::ostream& out);

std::vector<std::string> cmd_correlate(const PipelineConfig& config, const std::vector<std::string>& countries,
                                       std::size_t jobs);
std::vector<std::string> cmd_importance(const PipelineConfig& config, std::size_t jobs);

/// Parses argv, dispatches, maps exceptions to exit codes.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace yieldcycle::cli
