#include "yieldcycle/hypothesis.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "csv.hpp"
#include "yieldcycle/error.hpp"
#include "yieldcycle/tdist.hpp"

namespace yieldcycle {

TTestResult paired_t_test(std::span<const double> differences, double alpha) {
    if (differences.size() < 2) throw DataError("t-test needs at least two differences");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("t-test alpha must be in (0, 1)");
    const auto n = static_cast<double>(differences.size());
    const double mean = std::accumulate(differences.begin(), differences.end(), 0.0) / n;
    double ss = 0.0;
    for (double d : differences) ss += (d - mean) * (d - mean);
    bool constant = true;
    for (double d : differences) constant = constant && d == differences[0];
    if (constant || ss == 0.0) throw DataError("t-test differences have zero variance");

    TTestResult r;
    r.differences.assign(differences.begin(), differences.end());
    r.mean = mean;
    r.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    r.t = mean / r.std_error;
    r.df = static_cast<int>(differences.size()) - 1;
    r.alpha = alpha;
    r.critical_value = t_quantile(1.0 - alpha, r.df);
    r.significant = r.t > r.critical_value;
    return r;
}

HypothesisMatrix cycle_hypothesis_matrix(const std::map<std::string, HitMatrix>& hit_matrices, double alpha) {
    HypothesisMatrix out;
    for (const auto& [country, m] : hit_matrices) out.countries.push_back(country);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (i == j) continue;
            HypothesisCell cell{kAllCycles[i], kAllCycles[j], std::nullopt, {}};
            std::vector<double> e;
            for (const auto& [country, m] : hit_matrices) e.push_back(m[i][i] - m[j][i]);
            try {
                cell.result = paired_t_test(e, alpha);
            } catch (const DataError& err) {
                cell.error = err.what();
            }
            out.cells[i][j] = std::move(cell);
        }
    }
    return out;
}

void write_hypothesis_csv(std::ostream& out, const HypothesisMatrix& matrix) {
    out << "appropriate,alternative,test_set,t,df,critical_value,significant\n";
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const auto& cell = matrix.cells[i][j];
            if (!cell) continue;
            out << to_string(cell->appropriate) << ',' << to_string(cell->alternative) << ','
                << to_string(cell->appropriate) << ',';
            if (cell->result) {
                out << csv::format_double(cell->result->t) << ',' << cell->result->df << ','
                    << csv::format_double(cell->result->critical_value) << ','
                    << (cell->result->significant ? "true" : "false") << '\n';
            } else {
                out << ",,,\n";
            }
        }
    }
}

} // namespace yieldcycle
