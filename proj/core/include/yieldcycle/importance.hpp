#pragma once

// Per-cycle feature-importance tables: one row per country, one column per
// feature, each row normalized to sum to 1.

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "yieldcycle/classifier.hpp"
#include "yieldcycle/cycles.hpp"

namespace yieldcycle {

struct ImportanceTable {
    Cycle cycle = Cycle::MC1;
    std::vector<std::string> features; // column order
    std::vector<std::string> countries; // row order
    std::vector<std::vector<double>> values;
};

/// Models keyed by (country, cycle). Every model of one cycle must share the
/// feature list. Throws DataError for kinds without impurity importance.
std::map<Cycle, ImportanceTable> importance_heatmap(
    const std::map<std::pair<std::string, Cycle>, TrainedModel>& models);

/// `country,<features...>`.
void write_importance_csv(std::ostream& out, const ImportanceTable& table);

} // namespace yieldcycle
