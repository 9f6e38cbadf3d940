#include "yieldcycle/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "csv.hpp"
#include "yieldcycle/error.hpp"

namespace yieldcycle {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("pearson needs equally long inputs");
    if (x.size() < 2) throw DataError("pearson needs at least two points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DataError("pearson of a constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationReport correlation_report(const std::string& country, std::span<const AsgFeaturePair> pairs,
                                     const MicOptions& options) {
    CorrelationReport report{country, {}};
    for (const auto& pair : pairs) {
        const auto level = pair.level.final_series();
        const auto change = pair.change.final_series();
        const std::string name(to_string(pair.code));
        if (level.empty() || change.empty()) throw DataError(country + " " + name + ": empty feature series");
        const Month first = std::max(level.start, change.start);
        const Month last = std::min(level.last(), change.last());
        if (last < first) throw DataError(country + " " + name + ": level and change features do not overlap");
        std::vector<double> l;
        std::vector<double> c;
        for (Month m = first; m <= last; m = m + 1) {
            l.push_back(level.at(m));
            c.push_back(change.at(m));
        }
        try {
            report.rows.push_back({pair.code, l.size(), pearson(l, c), mic(l, c, options)});
        } catch (const DataError& e) {
            throw DataError(country + " " + name + ": " + e.what());
        }
    }
    return report;
}

void write_correlation_csv(std::ostream& out, const CorrelationReport& report) {
    out << "code,points,pcc,mic\n";
    for (const auto& row : report.rows) {
        out << to_string(row.code) << ',' << row.points << ',' << csv::format_double(row.pcc) << ','
            << csv::format_double(row.mic) << '\n';
    }
}

} // namespace yieldcycle
