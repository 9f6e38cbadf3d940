#include <gtest/gtest.h>

#include <atomic>
#include <set>

#include "test_support.hpp"
#include "yieldcycle/config.hpp"
#include "yieldcycle/error.hpp"
#include "yieldcycle/pipeline.hpp"
#include "yieldcycle/synthetic.hpp"

using namespace yieldcycle;
using yieldcycle::testing::TempDir;

TEST(ParallelFor, RunsEveryIndexOnce) {
    for (std::size_t jobs : {1u, 2u, 4u}) {
        std::vector<std::atomic<int>> hits(97);
        parallel_for(hits.size(), jobs, [&](std::size_t i) { ++hits[i]; });
        for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    }
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
    try {
        parallel_for(20, 3, [](std::size_t i) {
            if (i == 7 || i == 13) throw DataError("index " + std::to_string(i));
        });
        FAIL() << "expected an exception";
    } catch (const DataError& e) {
        EXPECT_STREQ(e.what(), "index 7");
    }
}

TEST(Synthetic, DeterministicPerCountry) {
    SyntheticOptions opt;
    const auto a = generate_country(opt, "UK");
    const auto b = generate_country(opt, "UK");
    const auto c = generate_country(opt, "GRM");
    ASSERT_EQ(a.indicators.size(), 8u);
    EXPECT_EQ(a.indicators[7].series.values, b.indicators[7].series.values);
    EXPECT_NE(a.indicators[7].series.values, c.indicators[7].series.values);
    EXPECT_EQ(a.indicators[0].series.size(), 450u);
    EXPECT_NO_THROW(a.calendar.validate());
}

class SyntheticCorpus : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir("corpus");
        SyntheticOptions opt;
        opt.countries = {"UK", "GRM"};
        write_synthetic_corpus(dir_->path(), opt);
    }
    static void TearDownTestSuite() {
        delete dir_;
        dir_ = nullptr;
    }
    static PipelineConfig config() { return load_config(dir_->path() / "config.json"); }
    static TempDir* dir_;
};

TempDir* SyntheticCorpus::dir_ = nullptr;

TEST_F(SyntheticCorpus, PrepareCountryBuildsThreeCycleDatasets) {
    const auto cfg = config();
    const auto d = prepare_country(cfg, "UK");
    EXPECT_EQ(d.pairs.size(), 8u);
    EXPECT_EQ(d.panel.columns.size(), 17u);
    std::size_t rows = 0;
    for (auto c : kAllCycles) {
        ASSERT_TRUE(d.datasets.datasets.count(c)) << to_string(c);
        const auto& ds = d.datasets.datasets.at(c);
        EXPECT_EQ(ds.cols(), 17u);
        EXPECT_EQ(ds.provenance.country, "UK");
        EXPECT_EQ(ds.provenance.cycle, c);
        EXPECT_NO_THROW(ds.validate());
        rows += ds.rows();
    }
    EXPECT_EQ(rows + d.datasets.diagnostics.dropped(), d.labels.size());
}

TEST_F(SyntheticCorpus, FeaturePresetsSelectColumns) {
    auto cfg = config();
    cfg.feature_preset = FeaturePreset::base;
    const auto base = prepare_country(cfg, "GRM");
    EXPECT_EQ(base.datasets.datasets.at(Cycle::MC2).feature_names, (std::vector<std::string>{"MP4_L", "MP4_C"}));
    cfg.feature_preset = FeaturePreset::excl_mp4;
    const auto excl = prepare_country(cfg, "GRM");
    const auto& names = excl.datasets.datasets.at(Cycle::MC2).feature_names;
    EXPECT_EQ(names.size(), 15u);
    for (const auto& n : names) EXPECT_EQ(n.find("MP4"), std::string::npos);
}

TEST_F(SyntheticCorpus, LabelIsNextMonthYieldMove) {
    // The label of the row at month t is the raw yield move from t to t+1.
    const auto cfg = config();
    const auto d = prepare_country(cfg, "UK");
    const auto raw = load_indicator_csv(indicator_path(cfg.data_dir, "UK", IndicatorCode::MP4), "UK",
                                        IndicatorCode::MP4, cfg.date_range);
    for (const auto& [cycle, ds] : d.datasets.datasets) {
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            const auto m = ds.months[i];
            const double move = raw.series.at(m + 1) - raw.series.at(m);
            EXPECT_EQ(ds.labels[i], move > 0 ? 1 : -1);
        }
    }
}

TEST_F(SyntheticCorpus, MissingFileNamesIt) {
    auto cfg = config();
    std::filesystem::remove(indicator_path(cfg.data_dir, "GRM", IndicatorCode::I1));
    try {
        prepare_country(cfg, "GRM");
        FAIL() << "expected a DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("GRM_I1.csv"), std::string::npos) << e.what();
    }
    write_synthetic_corpus(dir_->path(), [] {
        SyntheticOptions opt;
        opt.countries = {"UK", "GRM"};
        return opt;
    }());
}

TEST_F(SyntheticCorpus, CrossCycleCsvRoundTrip) {
    const auto mats = yieldcycle::testing::reference_hit_matrices();
    const auto path = dir_->path() / "cross.csv";
    {
        std::ofstream out(path);
        write_cross_cycle_csv(out, mats);
    }
    EXPECT_EQ(yieldcycle::testing::read_file(path).rfind("country,trained_on,MC1,MC2,MC3\n", 0), 0u);
    EXPECT_EQ(read_cross_cycle_csv(path), mats);
}
