#include "yieldcycle/importance.hpp"

#include <ostream>

#include "csv.hpp"
#include "yieldcycle/error.hpp"

namespace yieldcycle {

std::map<Cycle, ImportanceTable> importance_heatmap(
    const std::map<std::pair<std::string, Cycle>, TrainedModel>& models) {
    std::map<Cycle, ImportanceTable> out;
    for (const auto& [key, model] : models) {
        const auto& [country, cycle] = key;
        auto [it, inserted] = out.try_emplace(cycle);
        ImportanceTable& table = it->second;
        if (inserted) {
            table.cycle = cycle;
            table.features = model.feature_names;
        } else if (table.features != model.feature_names) {
            throw DataError("importance for " + std::string(to_string(cycle)) + ": " + country +
                            " uses a different feature list");
        }
        std::vector<double> row;
        for (const auto& [name, value] : feature_importance(model)) row.push_back(value);
        table.countries.push_back(country);
        table.values.push_back(std::move(row));
    }
    return out;
}

void write_importance_csv(std::ostream& out, const ImportanceTable& table) {
    out << "country";
    for (const auto& f : table.features) out << ',' << f;
    out << '\n';
    for (std::size_t r = 0; r < table.countries.size(); ++r) {
        out << table.countries[r];
        for (double v : table.values[r]) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

} // namespace yieldcycle
