#pragma once

// End-to-end run: load and transform every country, partition by cycle,
// build the level-1 and level-2 ensembles, score the target country, and
// assemble every report table.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "yieldcycle/config.hpp"
#include "yieldcycle/correlation.hpp"
#include "yieldcycle/hypothesis.hpp"
#include "yieldcycle/importance.hpp"
#include "yieldcycle/mla.hpp"

namespace yieldcycle {

/// Runs body(0..count-1) on up to `jobs` threads. Each index runs exactly
/// once; the first exception (lowest index) is rethrown after all finish.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body);

struct CountryData {
    std::string country;
    std::vector<AsgFeaturePair> pairs; // kAsgCodes order
    AlignedPanel panel;
    LabelSeries labels;
    CyclePartition partition;
    CycleDatasets datasets; // restricted to the configured feature preset
};

/// Loads the eight indicator files and the calendar of one country.
CountryData prepare_country(const PipelineConfig& config, const std::string& country);

struct Level1Entry {
    std::string country;
    Cycle cycle = Cycle::MC1;
    std::optional<Level1Result> result;
    std::string error; // set when the build failed
};

struct MlaRun {
    AggregateReport report;
    std::vector<Level1Entry> level1; // country-major, cycle order
    std::map<Cycle, Level2Result> level2;
    /// Each country's level-1 ensemble of every cycle scored on every target
    /// cycle (rows: training cycle, columns: target cycle). Only countries
    /// with all three ensembles and a target with all three subsets appear.
    std::map<std::string, HitMatrix> cross_cycle;
    /// Level-1 ensembles scored on the target subset of their own cycle, and
    /// the micro-average over the cycles.
    std::map<std::string, std::map<Cycle, double>> level1_on_target;
    std::map<std::string, double> level1_on_target_aggregate;
    std::optional<HypothesisMatrix> hypothesis;
    std::map<Cycle, ImportanceTable> importance;
    std::vector<AssemblyDiagnostics> diagnostics; // training countries, then target
    std::vector<std::string> warnings;
};

/// Default gradient boosting trained per (country, cycle) for importance.
std::map<std::pair<std::string, Cycle>, TrainedModel> importance_models(
    const PipelineConfig& config, const std::vector<CountryData>& countries, std::size_t jobs,
    std::vector<std::string>* warnings = nullptr);

MlaRun run_full_mla(const PipelineConfig& config, std::size_t jobs = 1);

/// Deterministic JSON: configuration, per-cycle scores, every selection,
/// tables and warnings. Contains no paths or timings.
std::string report_to_json(const PipelineConfig& config, const MlaRun& run);

void write_level1_on_target_csv(std::ostream& out, const MlaRun& run);
/// `country,trained_on,MC1,MC2,MC3`.
void write_cross_cycle_csv(std::ostream& out, const std::map<std::string, HitMatrix>& matrices);
std::map<std::string, HitMatrix> read_cross_cycle_csv(const std::filesystem::path& path);

/// Writes report.json and every table under config.output_dir. Returns the
/// files written, relative to output_dir.
std::vector<std::string> write_run_outputs(const PipelineConfig& config, const MlaRun& run);

} // namespace yieldcycle
