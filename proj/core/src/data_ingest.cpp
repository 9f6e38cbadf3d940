#include "yieldcycle/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include "json.hpp"
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "yieldcycle/error.hpp"

namespace yieldcycle {

std::string_view to_string(IndicatorCode code) {
    switch (code) {
    case IndicatorCode::FF1: return "FF1";
    case IndicatorCode::GM1: return "GM1";
    case IndicatorCode::GM2: return "GM2";
    case IndicatorCode::I1: return "I1";
    case IndicatorCode::I2: return "I2";
    case IndicatorCode::MP1: return "MP1";
    case IndicatorCode::MP2: return "MP2";
    case IndicatorCode::MP4: return "MP4";
    case IndicatorCode::O1: return "O1";
    }
    return "?";
}

IndicatorCode parse_indicator_code(std::string_view text) {
    for (auto code : kAsgCodes) {
        if (to_string(code) == text) return code;
    }
    if (text == "O1") return IndicatorCode::O1;
    throw DataError("unknown indicator code '" + std::string(text) + "'");
}

std::filesystem::path indicator_path(const std::filesystem::path& data_dir, const std::string& country,
                                     IndicatorCode code) {
    return data_dir / (country + "_" + std::string(to_string(code)) + ".csv");
}

IndicatorSeries load_indicator_csv(const std::filesystem::path& path, std::string country, IndicatorCode code,
                                   std::optional<MonthRange> range) {
    const auto rows = csv::read_file(path);
    const std::string where = path.string();
    if (rows.empty() || rows.front().fields.size() != 2 || rows.front().fields[0] != "month" ||
        rows.front().fields[1] != "value") {
        throw DataError(where + ": expected header 'month,value'");
    }

    struct Point {
        Month month;
        double value;
        std::size_t line;
    };
    std::vector<Point> points;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string ctx = where + " row " + std::to_string(row.line);
        if (row.fields.size() != 2) throw DataError(ctx + ": expected 2 fields, got " + std::to_string(row.fields.size()));
        Month month;
        try {
            month = Month::parse(row.fields[0]);
        } catch (const DataError& e) {
            throw DataError(ctx + ": " + e.what());
        }
        const double value = csv::parse_double(row.fields[1], ctx);
        if (!std::isfinite(value)) throw DataError(ctx + ": non-finite value '" + row.fields[1] + "'");
        if (range && !range->contains(month)) continue;
        points.push_back({month, value, row.line});
    }
    if (points.empty()) throw DataError(where + ": no data rows" + (range ? " inside the date range" : ""));

    std::stable_sort(points.begin(), points.end(), [](const Point& a, const Point& b) { return a.month < b.month; });
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& prev = points[i - 1];
        const auto& cur = points[i];
        if (cur.month == prev.month) {
            throw DataError(where + " row " + std::to_string(cur.line) + ": duplicate month " + cur.month.to_string() +
                            " (first seen at row " + std::to_string(prev.line) + ")");
        }
        if (cur.month - prev.month != 1) {
            throw DataError(where + " row " + std::to_string(cur.line) + ": gap in months, missing " +
                            (prev.month + 1).to_string() +
                            (cur.month - prev.month > 2 ? " through " + (cur.month - 1).to_string() : ""));
        }
    }

    IndicatorSeries out{std::move(country), code, {points.front().month, {}}};
    out.series.values.reserve(points.size());
    for (const auto& p : points) out.series.values.push_back(p.value);
    return out;
}

LabelSeries build_labels(const IndicatorSeries& yield_series) {
    const auto& s = yield_series.series;
    if (s.size() < 2) throw DataError(yield_series.country + ": yield series needs at least 2 months to build labels");
    LabelSeries out{yield_series.country, {}, {}};
    for (std::size_t t = 0; t + 1 < s.size(); ++t) {
        const double change = s.values[t + 1] - s.values[t];
        if (change == 0.0) continue;
        out.months.push_back(s.month_at(t));
        out.labels.push_back(change > 0.0 ? 1 : -1);
    }
    return out;
}

std::optional<std::size_t> AlignedPanel::row_of(Month m) const {
    auto it = std::lower_bound(months.begin(), months.end(), m);
    if (it == months.end() || *it != m) return std::nullopt;
    return static_cast<std::size_t>(it - months.begin());
}

std::string level_feature_name(IndicatorCode code) { return std::string(to_string(code)) + "_L"; }
std::string change_feature_name(IndicatorCode code) { return std::string(to_string(code)) + "_C"; }

const std::vector<std::string>& all_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (auto code : kAsgCodes) {
            out.push_back(level_feature_name(code));
            out.push_back(change_feature_name(code));
        }
        out.emplace_back("O1");
        return out;
    }();
    return names;
}

AlignedPanel build_panel(const std::string& country, std::span<const AsgFeaturePair> pairs) {
    std::map<IndicatorCode, const AsgFeaturePair*> by_code;
    for (const auto& p : pairs) {
        if (!by_code.emplace(p.code, &p).second) {
            throw DataError(country + ": duplicate ASG output for " + std::string(to_string(p.code)));
        }
    }
    Month first = Month::from_index(std::numeric_limits<std::int32_t>::min());
    Month last = Month::from_index(std::numeric_limits<std::int32_t>::max());
    for (auto code : kAsgCodes) {
        auto it = by_code.find(code);
        if (it == by_code.end()) throw DataError(country + ": missing indicator " + std::string(to_string(code)));
        for (const StageTrace* t : {&it->second->level, &it->second->change}) {
            if (t->size() == 0) throw DataError(country + ": empty ASG output for " + std::string(to_string(code)));
            first = std::max(first, t->start);
            last = std::min(last, t->month_at(t->size() - 1));
        }
    }
    if (last < first) throw DataError(country + ": indicators share no common months");

    AlignedPanel panel{country, {}, {}};
    for (Month m = first; m <= last; ++m) panel.months.push_back(m);
    auto column = [&](const StageTrace& t, std::string name) {
        FeatureColumn col{std::move(name), {}};
        col.values.reserve(panel.months.size());
        for (Month m : panel.months) col.values.push_back(t.final[static_cast<std::size_t>(m - t.start)]);
        panel.columns.push_back(std::move(col));
    };
    for (auto code : kAsgCodes) {
        column(by_code[code]->level, level_feature_name(code));
        column(by_code[code]->change, change_feature_name(code));
    }
    FeatureColumn month_col{"O1", {}};
    for (Month m : panel.months) month_col.values.push_back(static_cast<double>(m.month_of_year()));
    panel.columns.push_back(std::move(month_col));
    return panel;
}

FeaturePreset parse_feature_preset(std::string_view text) {
    if (text == "full") return FeaturePreset::full;
    if (text == "feature_extraction") return FeaturePreset::feature_extraction;
    if (text == "excl_mp4") return FeaturePreset::excl_mp4;
    if (text == "base") return FeaturePreset::base;
    throw DataError("unknown feature preset '" + std::string(text) + "'");
}

std::string_view to_string(FeaturePreset preset) {
    switch (preset) {
    case FeaturePreset::full: return "full";
    case FeaturePreset::feature_extraction: return "feature_extraction";
    case FeaturePreset::excl_mp4: return "excl_mp4";
    case FeaturePreset::base: return "base";
    }
    return "?";
}

std::vector<std::string> preset_features(FeaturePreset preset) {
    const auto& all = all_feature_names();
    std::vector<std::string> out;
    switch (preset) {
    case FeaturePreset::full:
        return all;
    case FeaturePreset::feature_extraction: {
        static const std::vector<std::string> important = {"MP4_C", "MP4_L", "MP1_C", "I2_L", "MP1_L", "I2_C", "FF1_L"};
        for (const auto& name : all) {
            if (std::find(important.begin(), important.end(), name) != important.end()) out.push_back(name);
        }
        return out;
    }
    case FeaturePreset::excl_mp4:
        for (const auto& name : all) {
            if (name != "MP4_L" && name != "MP4_C") out.push_back(name);
        }
        return out;
    case FeaturePreset::base:
        return {"MP4_L", "MP4_C"};
    }
    return out;
}

std::string Provenance::to_string() const {
    return country + (cycle ? "/" + std::string(yieldcycle::to_string(*cycle)) : std::string());
}

std::size_t Dataset::count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void Dataset::validate() const {
    const std::string who = "dataset " + provenance.to_string();
    if (labels.empty()) throw DataError(who + " has no rows");
    if (months.size() != labels.size() || static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw DataError(who + ": row counts of months, features and labels differ");
    }
    if (static_cast<std::size_t>(features.cols()) != feature_names.size()) {
        throw DataError(who + ": feature matrix width does not match feature names");
    }
    if (!features.allFinite()) throw DataError(who + " contains non-finite feature values");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1) throw DataError(who + ": label at row " + std::to_string(i) + " is not +-1");
        if (i > 0 && months[i] <= months[i - 1]) throw DataError(who + ": months not strictly increasing at row " + std::to_string(i));
    }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out{provenance, feature_names, {}, Eigen::MatrixXd(static_cast<Eigen::Index>(indices.size()), features.cols()), {}};
    out.months.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto i = indices[r];
        out.features.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(i));
        out.months.push_back(months.at(i));
        out.labels.push_back(labels.at(i));
    }
    return out;
}

Dataset Dataset::select_features(std::span<const std::string> names) const {
    Dataset out{provenance, {names.begin(), names.end()}, months,
                Eigen::MatrixXd(features.rows(), static_cast<Eigen::Index>(names.size())), labels};
    for (std::size_t j = 0; j < names.size(); ++j) {
        auto it = std::find(feature_names.begin(), feature_names.end(), names[j]);
        if (it == feature_names.end()) throw DataError("dataset " + provenance.to_string() + " has no feature '" + names[j] + "'");
        out.features.col(static_cast<Eigen::Index>(j)) = features.col(it - feature_names.begin());
    }
    return out;
}

Dataset Dataset::from_arrays(Eigen::MatrixXd features, std::vector<int> labels, std::vector<std::string> feature_names,
                             Provenance provenance) {
    if (feature_names.empty()) {
        for (Eigen::Index j = 0; j < features.cols(); ++j) feature_names.push_back("f" + std::to_string(j + 1));
    }
    Dataset out{std::move(provenance), std::move(feature_names), {}, std::move(features), std::move(labels)};
    for (std::size_t i = 0; i < out.labels.size(); ++i) out.months.push_back(Month(2000, 1) + static_cast<int>(i));
    out.validate();
    return out;
}

std::string AssemblyDiagnostics::to_json() const {
    nlohmann::ordered_json j;
    j["country"] = country;
    j["labeled_months"] = labeled_months;
    j["dropped_outside_cycles"] = dropped_outside_cycles;
    j["dropped_without_features"] = dropped_without_features;
    nlohmann::ordered_json rows = nlohmann::ordered_json::object();
    for (auto c : kAllCycles) {
        auto it = rows_per_cycle.find(c);
        rows[std::string(yieldcycle::to_string(c))] = it == rows_per_cycle.end() ? 0 : it->second;
    }
    j["rows_per_cycle"] = rows;
    j["warnings"] = warnings;
    return j.dump(2);
}

CycleDatasets assemble_datasets(const AlignedPanel& panel, const LabelSeries& labels, const CyclePartition& partition) {
    CycleDatasets out;
    auto& diag = out.diagnostics;
    diag.country = panel.country;
    diag.labeled_months = labels.size();

    std::map<Cycle, std::vector<std::pair<std::size_t, int>>> routed; // (panel row, label)
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const Month m = labels.months[i];
        const auto cycle = partition.at(m);
        if (!cycle) {
            ++diag.dropped_outside_cycles;
            continue;
        }
        const auto row = panel.row_of(m);
        if (!row) {
            ++diag.dropped_without_features;
            continue;
        }
        routed[*cycle].emplace_back(*row, labels.labels[i]);
    }

    const auto width = static_cast<Eigen::Index>(panel.columns.size());
    for (auto cycle : kAllCycles) {
        const auto& rows = routed[cycle];
        diag.rows_per_cycle[cycle] = rows.size();
        if (rows.empty()) {
            diag.warnings.push_back(panel.country + " " + std::string(to_string(cycle)) +
                                    ": no labeled rows; level-1 training for this cycle is skipped");
            continue;
        }
        Dataset ds;
        ds.provenance = {panel.country, cycle};
        for (const auto& col : panel.columns) ds.feature_names.push_back(col.name);
        ds.features.resize(static_cast<Eigen::Index>(rows.size()), width);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto [prow, label] = rows[r];
            for (Eigen::Index j = 0; j < width; ++j) {
                ds.features(static_cast<Eigen::Index>(r), j) = panel.columns[static_cast<std::size_t>(j)].values[prow];
            }
            ds.months.push_back(panel.months[prow]);
            ds.labels.push_back(label);
        }
        ds.validate();
        out.datasets.emplace(cycle, std::move(ds));
    }
    return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    out << "# country=" << data.provenance.country
        << ",cycle=" << (data.provenance.cycle ? std::string(to_string(*data.provenance.cycle)) : std::string()) << '\n';
    out << "month";
    for (const auto& name : data.feature_names) out << ',' << name;
    out << ",label\n";
    for (std::size_t i = 0; i < data.rows(); ++i) {
        out << data.months[i].to_string();
        for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
            out << ',' << csv::format_double(data.features(static_cast<Eigen::Index>(i), j));
        }
        out << ',' << data.labels[i] << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    Dataset ds;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw DataError("dataset file: missing provenance line");
    for (const auto& kv : csv::split(std::string_view(line).substr(2))) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const auto key = kv.substr(0, eq);
        const auto value = kv.substr(eq + 1);
        if (key == "country") ds.provenance.country = value;
        if (key == "cycle" && !value.empty()) ds.provenance.cycle = parse_cycle(value);
    }
    if (!std::getline(in, line)) throw DataError("dataset file: missing header");
    auto header = csv::split(line);
    if (header.size() < 2 || header.front() != "month" || header.back() != "label") {
        throw DataError("dataset file: header must be month,<features...>,label");
    }
    ds.feature_names.assign(header.begin() + 1, header.end() - 1);
    std::vector<std::vector<double>> rows;
    std::size_t number = 2;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        auto fields = csv::split(line);
        const std::string ctx = "dataset file row " + std::to_string(number);
        if (fields.size() != header.size()) throw DataError(ctx + ": wrong field count");
        ds.months.push_back(Month::parse(fields.front()));
        std::vector<double> row;
        for (std::size_t j = 1; j + 1 < fields.size(); ++j) row.push_back(csv::parse_double(fields[j], ctx));
        rows.push_back(std::move(row));
        const double label = csv::parse_double(fields.back(), ctx);
        ds.labels.push_back(static_cast<int>(label));
    }
    ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ds.feature_names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    ds.validate();
    return ds;
}

} // namespace yieldcycle
