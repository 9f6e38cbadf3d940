#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "yieldcycle/correlation.hpp"
#include "yieldcycle/error.hpp"
#include "yieldcycle/pipeline.hpp"
#include "yieldcycle/random.hpp"

namespace yieldcycle::cli {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

std::vector<std::string> all_countries(const PipelineConfig& config) {
    auto out = config.countries;
    out.push_back(config.target_country);
    return out;
}

std::vector<std::string> or_all(const PipelineConfig& config, const std::vector<std::string>& chosen) {
    return chosen.empty() ? all_countries(config) : chosen;
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string csv_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

std::vector<AsgFeaturePair> load_pairs(const PipelineConfig& config, const std::string& country) {
    std::vector<AsgFeaturePair> pairs;
    for (auto code : kAsgCodes) {
        const auto series =
            load_indicator_csv(indicator_path(config.data_dir, country, code), country, code, config.date_range);
        pairs.push_back(asg_transform(series, config.asg));
    }
    return pairs;
}

} // namespace

std::vector<std::string> cmd_transform(const PipelineConfig& config, const TransformOptions& options) {
    std::vector<IndicatorCode> codes;
    for (const auto& c : options.codes) {
        const auto code = parse_indicator_code(c);
        if (code == IndicatorCode::O1) throw DataError("O1 is not ASG-transformed");
        codes.push_back(code);
    }
    if (codes.empty()) codes.assign(kAsgCodes.begin(), kAsgCodes.end());
    std::vector<std::string> written;
    for (const auto& country : or_all(config, options.countries)) {
        for (auto code : codes) {
            const auto series =
                load_indicator_csv(indicator_path(config.data_dir, country, code), country, code, config.date_range);
            AsgFeaturePair pair;
            try {
                pair = asg_transform(series, config.asg);
            } catch (const DataError& e) {
                throw DataError(std::string("ASG transform: ") + e.what());
            }
            std::ostringstream text;
            write_trace_csv(text, pair);
            const std::string name = "traces/" + country + "_" + std::string(to_string(code)) + "_trace.csv";
            write_text(config.output_dir / name, text.str());
            written.push_back(name);
        }
    }
    return written;
}

std::vector<std::string> cmd_partition(const PipelineConfig& config, const std::vector<std::string>& countries,
                                       std::size_t jobs) {
    const auto names = or_all(config, countries);
    std::vector<CountryData> data(names.size());
    parallel_for(names.size(), jobs, [&](std::size_t i) { data[i] = prepare_country(config, names[i]); });
    std::vector<std::string> written;
    for (const auto& d : data) {
        std::ostringstream part;
        write_partition_csv(part, d.partition);
        const std::string pname = "partitions/" + d.country + "_partition.csv";
        write_text(config.output_dir / pname, part.str());
        written.push_back(pname);
        const std::string dname = "partitions/" + d.country + "_diagnostics.json";
        write_text(config.output_dir / dname, d.datasets.diagnostics.to_json() + "\n");
        written.push_back(dname);
        for (const auto& [cycle, ds] : d.datasets.datasets) {
            std::ostringstream t;
            write_dataset_csv(t, ds);
            const std::string name = "datasets/" + d.country + "_" + std::string(to_string(cycle)) + ".csv";
            write_text(config.output_dir / name, t.str());
            written.push_back(name);
        }
    }
    return written;
}

std::vector<std::string> cmd_run(const PipelineConfig& config, std::size_t jobs, std::ostream& out) {
    const auto run = run_full_mla(config, jobs);
    const auto written = write_run_outputs(config, run);
    for (const auto& [cycle, s] : run.report.per_cycle) {
        out << to_string(cycle) << ": " << fixed(s.hit_rate) << " (" << s.correct << "/" << s.total << ")\n";
    }
    for (auto cycle : run.report.rejected_cycles) out << to_string(cycle) << ": rejected\n";
    out << "overall hit rate: " << fixed(run.report.overall_hit_rate) << " (" << run.report.correct << "/"
        << run.report.total << ")\n";
    return written;
}

std::vector<std::string> cmd_sweep_savgol(const PipelineConfig& config, const SweepOptions& options,
                                          std::size_t jobs, std::ostream& out) {
    std::ostringstream table;
    table << "sg_window,sg_order,cycle,classifier,mean_hit_rate,datasets\n";
    std::ostringstream notes;
    for (int window : options.windows) {
        for (int order : options.orders) {
            PipelineConfig c = config;
            c.asg.sg_window = window;
            c.asg.sg_order = order;
            try {
                c.asg.validate();
            } catch (const DataError& e) {
                notes << "skipped window " << window << ", order " << order << ": " << e.what() << '\n';
                continue;
            }
            std::vector<CountryData> data(c.countries.size());
            parallel_for(data.size(), jobs, [&](std::size_t i) { data[i] = prepare_country(c, c.countries[i]); });

            struct Cell {
                double sum = 0.0;
                std::size_t count = 0;
            };
            // scores[country][cycle][spec]
            std::vector<std::map<Cycle, std::vector<std::optional<double>>>> scores(data.size());
            parallel_for(data.size(), jobs, [&](std::size_t i) {
                for (const auto& [cycle, ds] : data[i].datasets.datasets) {
                    auto& row = scores[i][cycle];
                    for (const auto& spec : c.classifiers) {
                        const auto id = "sweep/" + data[i].country + "/" + std::string(to_string(cycle));
                        try {
                            row.push_back(cross_validate(spec, ds, c.cv, derive_seed(c.seed, id, 0)).mean_hit_rate);
                        } catch (const DataError&) {
                            row.push_back(std::nullopt);
                        }
                    }
                }
            });
            for (auto cycle : kAllCycles) {
                for (std::size_t s = 0; s < c.classifiers.size(); ++s) {
                    Cell cell;
                    for (const auto& by_cycle : scores) {
                        const auto it = by_cycle.find(cycle);
                        if (it == by_cycle.end() || !it->second[s]) continue;
                        cell.sum += *it->second[s];
                        ++cell.count;
                    }
                    table << window << ',' << order << ',' << to_string(cycle) << ',' << c.classifiers[s].kind << ',';
                    if (cell.count > 0) table << csv_double(cell.sum / static_cast<double>(cell.count));
                    table << ',' << cell.count << '\n';
                }
            }
        }
    }
    std::vector<std::string> written = {"savgol_sweep.csv", "savgol_sweep_notes.txt"};
    write_text(config.output_dir / written[0], table.str());
    write_text(config.output_dir / written[1], notes.str());
    out << notes.str();
    return written;
}

void cmd_ttest(const fs::path& input, double alpha, const fs::path& output, std::ostream& out) {
    const auto matrices = read_cross_cycle_csv(input);
    if (matrices.size() < 2) throw DataError(input.string() + ": t-tests need at least two countries");
    const auto h = cycle_hypothesis_matrix(matrices, alpha);
    std::ostringstream text;
    write_hypothesis_csv(text, h);
    if (!output.empty()) write_text(output, text.str());
    out << "appropriate vs alternative (test set = appropriate cycle), one-tailed alpha " << alpha << "\n";
    for (const auto& row : h.cells) {
        for (const auto& cell : row) {
            if (!cell) continue;
            out << to_string(cell->appropriate) << " vs " << to_string(cell->alternative) << ": ";
            if (cell->result) {
                out << "t = " << fixed(cell->result->t, 3) << (cell->result->significant ? " significant" : "") << '\n';
            } else {
                out << cell->error << '\n';
            }
        }
    }
}

std::vector<std::string> cmd_correlate(const PipelineConfig& config, const std::vector<std::string>& countries,
                                       std::size_t jobs) {
    const auto names = or_all(config, countries);
    std::vector<CorrelationReport> reports(names.size());
    parallel_for(names.size(), jobs, [&](std::size_t i) {
        const auto pairs = load_pairs(config, names[i]);
        reports[i] = correlation_report(names[i], pairs, config.mic);
    });
    std::vector<std::string> written;
    for (const auto& r : reports) {
        std::ostringstream t;
        write_correlation_csv(t, r);
        const std::string name = "correlation/" + r.country + "_correlation.csv";
        write_text(config.output_dir / name, t.str());
        written.push_back(name);
    }
    return written;
}

std::vector<std::string> cmd_importance(const PipelineConfig& config, std::size_t jobs) {
    std::vector<CountryData> data(config.countries.size());
    parallel_for(data.size(), jobs, [&](std::size_t i) { data[i] = prepare_country(config, config.countries[i]); });
    std::vector<std::string> warnings;
    const auto tables = importance_heatmap(importance_models(config, data, jobs, &warnings));
    std::vector<std::string> written;
    for (const auto& [cycle, table] : tables) {
        std::ostringstream t;
        write_importance_csv(t, table);
        const std::string name = "importance_" + std::string(to_string(cycle)) + ".csv";
        write_text(config.output_dir / name, t.str());
        written.push_back(name);
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    return written;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monthly bond-yield direction from macro-financial indicators"};
    app.require_subcommand(1);
    std::string config_path;
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Pipeline config (JSON)")->required();
        sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Override the config seed");
    };

    TransformOptions transform_opts;
    auto* transform = app.add_subcommand("transform", "Write ASG stage traces per (country, code)");
    add_common(transform);
    transform->add_option("--country", transform_opts.countries, "Only these countries");
    transform->add_option("--code", transform_opts.codes, "Only these indicator codes");

    std::vector<std::string> partition_countries;
    auto* partition = app.add_subcommand("partition", "Write cycle partitions and per-cycle datasets");
    add_common(partition);
    partition->add_option("--country", partition_countries, "Only these countries");

    auto* run_cmd = app.add_subcommand("run", "Run the full meta-learner and write every report");
    add_common(run_cmd);

    SweepOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep-savgol", "Cross-validated hit rates over Sav-Gol parameters");
    add_common(sweep);
    sweep->add_option("--windows", sweep_opts.windows, "Window lengths")->delimiter(',');
    sweep->add_option("--orders", sweep_opts.orders, "Polynomial orders")->delimiter(',');

    std::string ttest_input;
    std::string ttest_output;
    double ttest_alpha = 0.10;
    auto* ttest = app.add_subcommand("ttest", "Cross-cycle paired t-tests on a hit-rate matrix file");
    ttest->add_option("--config", config_path, "Pipeline config; supplies defaults for --input and --out");
    ttest->add_option("--input", ttest_input, "country,trained_on,MC1,MC2,MC3 file");
    ttest->add_option("--out", ttest_output, "Where to write the t-score CSV");
    auto* alpha_opt = ttest->add_option("--alpha", ttest_alpha, "One-tailed significance level");
    ttest->add_option("--jobs", jobs, "Ignored; accepted for uniformity");
    ttest->add_option("--seed", seed, "Ignored; accepted for uniformity");

    std::vector<std::string> correlate_countries;
    auto* correlate = app.add_subcommand("correlate", "Pearson and MIC between level and change features");
    add_common(correlate);
    correlate->add_option("--country", correlate_countries, "Only these countries");

    auto* importance = app.add_subcommand("importance", "Gradient-boosting feature importance per cycle");
    add_common(importance);

    SyntheticOptions synth_opts;
    std::string synth_dir;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with a planted signal");
    synth->add_option("--out", synth_dir, "Output directory")->required();
    synth->add_option("--seed", synth_opts.seed, "Generator seed");
    synth->add_option("--months", synth_opts.months, "Months per country")->check(CLI::PositiveNumber);
    synth->add_option("--flip-rate", synth_opts.flip_rate, "Fraction of flipped directions")->check(CLI::Range(0.0, 0.5));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }

    try {
        auto load = [&] {
            auto c = load_config(config_path);
            if (seed) c.seed = *seed;
            return c;
        };
        std::vector<std::string> written;
        fs::path out_dir;
        if (transform->parsed()) {
            const auto c = load();
            out_dir = c.output_dir;
            written = cmd_transform(c, transform_opts);
        } else if (partition->parsed()) {
            const auto c = load();
            out_dir = c.output_dir;
            written = cmd_partition(c, partition_countries, jobs);
        } else if (run_cmd->parsed()) {
            const auto c = load();
            out_dir = c.output_dir;
            written = cmd_run(c, jobs, out);
        } else if (sweep->parsed()) {
            const auto c = load();
            out_dir = c.output_dir;
            written = cmd_sweep_savgol(c, sweep_opts, jobs, out);
        } else if (ttest->parsed()) {
            fs::path input = ttest_input;
            fs::path output = ttest_output;
            if (!config_path.empty()) {
                const auto c = load();
                if (input.empty()) input = c.output_dir / "cross_cycle_hit_rates.csv";
                if (output.empty()) output = c.output_dir / "ttest_matrix.csv";
                if (alpha_opt->count() == 0) ttest_alpha = c.ttest_alpha;
            }
            if (input.empty()) throw DataError("ttest needs --input or --config");
            cmd_ttest(input, ttest_alpha, output, out);
        } else if (correlate->parsed()) {
            const auto c = load();
            out_dir = c.output_dir;
            written = cmd_correlate(c, correlate_countries, jobs);
        } else if (importance->parsed()) {
            const auto c = load();
            out_dir = c.output_dir;
            written = cmd_importance(c, jobs);
        } else if (synth->parsed()) {
            out_dir = synth_dir;
            written = write_synthetic_corpus(synth_dir, synth_opts);
        }
        for (const auto& w : written) out << "wrote " << (out_dir / w).string() << '\n';
        return kOk;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

} // namespace yieldcycle::cli
