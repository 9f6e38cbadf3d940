#pragma once

// Linear (Pearson) and general (MIC) dependence between the level and change
// features of each indicator.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "yieldcycle/asg.hpp"
#include "yieldcycle/mic.hpp"

namespace yieldcycle {

/// Sample correlation coefficient. Throws DataError for unequal lengths,
/// fewer than two points, or a constant input.
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationRow {
    IndicatorCode code = IndicatorCode::FF1;
    std::size_t points = 0; // months where both features exist
    double pcc = 0.0;
    double mic = 0.0;
};

struct CorrelationReport {
    std::string country;
    std::vector<CorrelationRow> rows; // input order
};

/// Level vs change feature of each pair, on their common months.
CorrelationReport correlation_report(const std::string& country, std::span<const AsgFeaturePair> pairs,
                                     const MicOptions& options = {});

/// `code,points,pcc,mic`.
void write_correlation_csv(std::ostream& out, const CorrelationReport& report);

} // namespace yieldcycle
