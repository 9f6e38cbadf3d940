#include "yieldcycle/pipeline.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "json.hpp"
#include "yieldcycle/error.hpp"
#include "yieldcycle/random.hpp"

namespace yieldcycle {

namespace {

using nlohmann::json;

std::string cycle_name(Cycle c) { return std::string(to_string(c)); }

json selection_json(const SelectionSet& s) {
    json ranked = json::array();
    for (const auto& r : s.ranked) ranked.push_back({{"id", r.id}, {"hit_rate", r.hit_rate}});
    json j{{"level", s.level}, {"country", s.country}, {"cycle", cycle_name(s.cycle)},
           {"ranked", ranked}, {"chosen", s.chosen}, {"rejected", s.rejected}};
    if (!s.excluded.empty()) j["excluded"] = s.excluded;
    if (!s.note.empty()) j["note"] = s.note;
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

} // namespace

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body) {
    std::vector<std::exception_ptr> errors(count);
    auto run = [&](std::size_t i) {
        try {
            body(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(jobs, 1), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) run(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) run(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

CountryData prepare_country(const PipelineConfig& config, const std::string& country) {
    CountryData d;
    d.country = country;
    const IndicatorSeries* yield = nullptr;
    std::vector<IndicatorSeries> raw;
    raw.reserve(kAsgCodes.size());
    for (auto code : kAsgCodes) {
        raw.push_back(load_indicator_csv(indicator_path(config.data_dir, country, code), country, code,
                                         config.date_range));
        d.pairs.push_back(asg_transform(raw.back(), config.asg));
    }
    for (const auto& s : raw) {
        if (s.code == IndicatorCode::MP4) yield = &s;
    }
    d.labels = build_labels(*yield);
    d.panel = build_panel(country, d.pairs);
    const auto calendar = load_calendar_csv(config.calendar_path(country), country);
    d.partition = partition_months(calendar, yield->series.range());
    d.datasets = assemble_datasets(d.panel, d.labels, d.partition);
    const auto features = preset_features(config.feature_preset);
    for (auto& [cycle, data] : d.datasets.datasets) data = data.select_features(features);
    return d;
}

std::map<std::pair<std::string, Cycle>, TrainedModel> importance_models(const PipelineConfig& config,
                                                                        const std::vector<CountryData>& countries,
                                                                        std::size_t jobs,
                                                                        std::vector<std::string>* warnings) {
    struct Task {
        const Dataset* data;
        std::string country;
        Cycle cycle;
        std::optional<TrainedModel> model;
        std::string error;
    };
    std::vector<Task> tasks;
    for (const auto& c : countries) {
        for (const auto& [cycle, data] : c.datasets.datasets) tasks.push_back({&data, c.country, cycle, {}, {}});
    }
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        auto& t = tasks[i];
        const auto id = "importance/" + t.country + "/" + cycle_name(t.cycle);
        try {
            t.model = train({std::string(kinds::gradient_boosting), {}}, *t.data, derive_seed(config.seed, id, 0));
        } catch (const DataError& e) {
            t.error = e.what();
        }
    });
    std::map<std::pair<std::string, Cycle>, TrainedModel> out;
    for (auto& t : tasks) {
        if (t.model) out.emplace(std::make_pair(t.country, t.cycle), std::move(*t.model));
        else if (warnings) warnings->push_back("importance skipped for " + t.country + "/" + cycle_name(t.cycle) + ": " + t.error);
    }
    return out;
}

MlaRun run_full_mla(const PipelineConfig& config, std::size_t jobs) {
    config.validate();
    MlaRun run;

    std::vector<std::string> names = config.countries;
    names.push_back(config.target_country);
    std::vector<CountryData> data(names.size());
    parallel_for(names.size(), jobs, [&](std::size_t i) { data[i] = prepare_country(config, names[i]); });
    const CountryData target = std::move(data.back());
    data.pop_back();
    for (const auto& d : data) run.diagnostics.push_back(d.datasets.diagnostics);
    run.diagnostics.push_back(target.datasets.diagnostics);
    for (const auto& d : run.diagnostics) {
        for (const auto& w : d.warnings) run.warnings.push_back(d.country + ": " + w);
    }
    for (auto cycle : kAllCycles) {
        if (!target.datasets.datasets.contains(cycle)) {
            throw DataError("target country " + config.target_country + " has no labeled rows in cycle " +
                            cycle_name(cycle));
        }
    }

    // Level 1: one ensemble per (training country, cycle).
    Level1Options options;
    options.cv = config.cv;
    options.grids = config.grids;
    options.members = config.level1_members;
    for (const auto& d : data) {
        for (auto cycle : kAllCycles) run.level1.push_back({d.country, cycle, std::nullopt, {}});
    }
    parallel_for(run.level1.size(), jobs, [&](std::size_t i) {
        auto& entry = run.level1[i];
        const auto& sets = data[i / kAllCycles.size()].datasets.datasets;
        const auto it = sets.find(entry.cycle);
        if (it == sets.end()) {
            entry.error = "no labeled rows";
            return;
        }
        const auto id = "level1/" + entry.country + "/" + cycle_name(entry.cycle);
        try {
            entry.result = build_level1(it->second, config.classifiers, options, derive_seed(config.seed, id, 0));
        } catch (const DataError& e) {
            entry.error = e.what();
        }
    });
    for (const auto& e : run.level1) {
        if (!e.result) run.warnings.push_back("level 1 skipped for " + e.country + "/" + cycle_name(e.cycle) + ": " + e.error);
    }

    // Level 2: cross-country selection on the target subset of each cycle.
    std::map<Cycle, VotingEnsemble> accepted;
    for (auto cycle : kAllCycles) {
        std::vector<VotingEnsemble> candidates;
        for (const auto& e : run.level1) {
            if (e.cycle == cycle && e.result) candidates.push_back(e.result->ensemble);
        }
        Level2Result result;
        if (candidates.empty()) {
            result.selection.level = 2;
            result.selection.country = std::string(kCrossCountry);
            result.selection.cycle = cycle;
            result.selection.rejected = true;
            result.selection.note = "no level-1 ensembles";
        } else {
            result = build_level2(cycle, candidates, target.datasets.datasets.at(cycle), config.threshold,
                                  config.level2_members);
        }
        if (result.ensemble) accepted.emplace(cycle, *result.ensemble);
        run.level2.emplace(cycle, std::move(result));
    }

    run.report = evaluate_overall(accepted, target.datasets.datasets);
    for (const auto& e : run.level1) {
        if (e.result) run.report.selections.push_back(e.result->selection);
    }
    for (const auto& [cycle, result] : run.level2) {
        run.report.selections.push_back(result.selection);
        if (!result.ensemble) run.report.rejected_cycles.push_back(cycle);
    }

    // Level-1 ensembles on every target subset.
    std::map<std::string, std::map<Cycle, std::map<Cycle, std::pair<std::size_t, std::size_t>>>> counts;
    for (const auto& e : run.level1) {
        if (!e.result) continue;
        for (auto test : kAllCycles) {
            const auto& t = target.datasets.datasets.at(test);
            const auto votes = e.result->ensemble.vote_rows(t.features);
            std::size_t correct = 0;
            for (std::size_t r = 0; r < votes.size(); ++r) correct += votes[r] == t.labels[r] ? 1 : 0;
            counts[e.country][e.cycle][test] = {correct, votes.size()};
        }
    }
    for (const auto& [country, by_train] : counts) {
        std::size_t correct = 0;
        std::size_t total = 0;
        for (const auto& [train_cycle, by_test] : by_train) {
            const auto [c, n] = by_test.at(train_cycle);
            run.level1_on_target[country][train_cycle] = static_cast<double>(c) / static_cast<double>(n);
            correct += c;
            total += n;
        }
        run.level1_on_target_aggregate[country] = static_cast<double>(correct) / static_cast<double>(total);
        if (by_train.size() == kAllCycles.size()) {
            HitMatrix m{};
            for (auto tr : kAllCycles) {
                for (auto te : kAllCycles) {
                    const auto [c, n] = by_train.at(tr).at(te);
                    m[cycle_index(tr)][cycle_index(te)] = static_cast<double>(c) / static_cast<double>(n);
                }
            }
            run.cross_cycle[country] = m;
        }
    }
    if (run.cross_cycle.size() >= 2) {
        run.hypothesis = cycle_hypothesis_matrix(run.cross_cycle, config.ttest_alpha);
    } else {
        run.warnings.push_back("cycle t-tests need at least two countries with all three level-1 ensembles");
    }

    run.importance = importance_heatmap(importance_models(config, data, jobs, &run.warnings));
    return run;
}

std::string report_to_json(const PipelineConfig& config, const MlaRun& run) {
    json j;
    j["config"] = json::parse(config_to_json(config));
    j["features"] = preset_features(config.feature_preset);
    j["overall"] = {{"hit_rate", run.report.overall_hit_rate},
                    {"correct", run.report.correct},
                    {"total", run.report.total}};
    json per_cycle = json::object();
    for (const auto& [cycle, s] : run.report.per_cycle) {
        per_cycle[cycle_name(cycle)] = {{"correct", s.correct}, {"total", s.total}, {"hit_rate", s.hit_rate}};
    }
    j["per_cycle"] = per_cycle;
    json rejected = json::array();
    for (auto c : run.report.rejected_cycles) rejected.push_back(cycle_name(c));
    j["rejected_cycles"] = rejected;

    json level1 = json::array();
    for (const auto& e : run.level1) {
        json item{{"country", e.country}, {"cycle", cycle_name(e.cycle)}};
        if (!e.result) {
            item["error"] = e.error;
        } else {
            item["selection"] = selection_json(e.result->selection);
            json members = json::array();
            const auto& vc = e.result->ensemble;
            for (std::size_t m = 0; m < vc.size(); ++m) {
                const auto& rep = e.result->tuned_reports[m];
                members.push_back({{"id", vc.member_ids[m]},
                                   {"cv_hit_rate", vc.member_hit_rates[m]},
                                   {"fold_hit_rates", rep.fold_hit_rates}});
            }
            item["members"] = members;
        }
        level1.push_back(item);
    }
    j["level1"] = level1;

    json level2 = json::object();
    for (const auto& [cycle, r] : run.level2) level2[cycle_name(cycle)] = selection_json(r.selection);
    j["level2"] = level2;

    json on_target = json::object();
    for (const auto& [country, by_cycle] : run.level1_on_target) {
        json row = json::object();
        for (const auto& [cycle, h] : by_cycle) row[cycle_name(cycle)] = h;
        row["aggregate"] = run.level1_on_target_aggregate.at(country);
        on_target[country] = row;
    }
    j["level1_on_target"] = on_target;

    json cross = json::object();
    for (const auto& [country, m] : run.cross_cycle) cross[country] = m;
    j["cross_cycle"] = cross;

    if (run.hypothesis) {
        json cells = json::array();
        for (const auto& row : run.hypothesis->cells) {
            for (const auto& cell : row) {
                if (!cell) continue;
                json c{{"appropriate", cycle_name(cell->appropriate)}, {"alternative", cycle_name(cell->alternative)}};
                if (cell->result) {
                    c["t"] = cell->result->t;
                    c["df"] = cell->result->df;
                    c["critical_value"] = cell->result->critical_value;
                    c["significant"] = cell->result->significant;
                } else {
                    c["error"] = cell->error;
                }
                cells.push_back(c);
            }
        }
        j["ttest"] = cells;
    } else {
        j["ttest"] = nullptr;
    }

    json importance = json::object();
    for (const auto& [cycle, table] : run.importance) {
        json rows = json::object();
        for (std::size_t r = 0; r < table.countries.size(); ++r) rows[table.countries[r]] = table.values[r];
        importance[cycle_name(cycle)] = {{"features", table.features}, {"rows", rows}};
    }
    j["importance"] = importance;

    json diagnostics = json::array();
    for (const auto& d : run.diagnostics) diagnostics.push_back(json::parse(d.to_json()));
    j["diagnostics"] = diagnostics;
    j["warnings"] = run.warnings;
    return j.dump(2) + "\n";
}

void write_level1_on_target_csv(std::ostream& out, const MlaRun& run) {
    out << "country,MC1,MC2,MC3,aggregate\n";
    for (const auto& [country, by_cycle] : run.level1_on_target) {
        out << country;
        for (auto c : kAllCycles) {
            out << ',';
            if (const auto it = by_cycle.find(c); it != by_cycle.end()) out << csv::format_double(it->second);
        }
        out << ',' << csv::format_double(run.level1_on_target_aggregate.at(country)) << '\n';
    }
}

void write_cross_cycle_csv(std::ostream& out, const std::map<std::string, HitMatrix>& matrices) {
    out << "country,trained_on,MC1,MC2,MC3\n";
    for (const auto& [country, m] : matrices) {
        for (auto tr : kAllCycles) {
            out << country << ',' << to_string(tr);
            for (auto te : kAllCycles) out << ',' << csv::format_double(m[cycle_index(tr)][cycle_index(te)]);
            out << '\n';
        }
    }
}

std::map<std::string, HitMatrix> read_cross_cycle_csv(const std::filesystem::path& path) {
    const auto rows = csv::read_file(path);
    const std::vector<std::string> header = {"country", "trained_on", "MC1", "MC2", "MC3"};
    if (rows.empty() || rows.front().fields != header) {
        throw DataError(path.string() + ": expected header 'country,trained_on,MC1,MC2,MC3'");
    }
    std::map<std::string, HitMatrix> out;
    std::map<std::string, std::array<bool, 3>> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string ctx = path.string() + " row " + std::to_string(r.line);
        if (r.fields.size() != 5) throw DataError(ctx + ": expected 5 fields");
        Cycle tr;
        try {
            tr = parse_cycle(r.fields[1]);
        } catch (const DataError& e) {
            throw DataError(ctx + ": " + e.what());
        }
        auto& flags = seen[r.fields[0]];
        if (flags[cycle_index(tr)]) throw DataError(ctx + ": duplicate row for " + r.fields[0] + "/" + r.fields[1]);
        flags[cycle_index(tr)] = true;
        auto& m = out[r.fields[0]];
        for (int c = 0; c < 3; ++c) {
            m[cycle_index(tr)][c] = csv::parse_double(r.fields[2 + c], ctx);
            const double v = m[cycle_index(tr)][c];
            if (!(v >= 0.0 && v <= 1.0)) throw DataError(ctx + ": hit rate outside [0, 1]");
        }
    }
    for (const auto& [country, flags] : seen) {
        if (!(flags[0] && flags[1] && flags[2])) throw DataError(path.string() + ": " + country + " needs rows for MC1, MC2 and MC3");
    }
    return out;
}

std::vector<std::string> write_run_outputs(const PipelineConfig& config, const MlaRun& run) {
    std::filesystem::create_directories(config.output_dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        write_file(config.output_dir / name, text);
        written.push_back(name);
    };
    emit("report.json", report_to_json(config, run));
    std::ostringstream table2;
    write_level1_on_target_csv(table2, run);
    emit("level1_on_target.csv", table2.str());
    std::ostringstream cross;
    write_cross_cycle_csv(cross, run.cross_cycle);
    emit("cross_cycle_hit_rates.csv", cross.str());
    if (run.hypothesis) {
        std::ostringstream t;
        write_hypothesis_csv(t, *run.hypothesis);
        emit("ttest_matrix.csv", t.str());
    }
    for (const auto& [cycle, table] : run.importance) {
        std::ostringstream t;
        write_importance_csv(t, table);
        emit("importance_" + cycle_name(cycle) + ".csv", t.str());
    }
    return written;
}

} // namespace yieldcycle
