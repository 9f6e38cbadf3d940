#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "test_support.hpp"
#include "yieldcycle/correlation.hpp"
#include "yieldcycle/error.hpp"
#include "yieldcycle/hypothesis.hpp"
#include "yieldcycle/importance.hpp"
#include "yieldcycle/mic.hpp"
#include "yieldcycle/tdist.hpp"

using namespace yieldcycle;

namespace {

const std::vector<double> kDifferences = {0.175, 0.046, 0.014, 0.070, 0.095};

/// Simpson integration of the t density: an oracle for t_cdf.
double t_cdf_by_quadrature(double t, double df) {
    const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
    auto pdf = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
    const int n = 20000;
    const double a = 0.0, h = (t - a) / n;
    double s = pdf(a) + pdf(t);
    for (int i = 1; i < n; ++i) s += pdf(a + i * h) * (i % 2 ? 4 : 2);
    return 0.5 + s * h / 3;
}

} // namespace

TEST(TDistribution, CdfMatchesQuadrature) {
    for (double df : {1.0, 2.0, 4.0, 7.5, 30.0}) {
        for (double t : {-3.0, -0.7, 0.0, 0.4, 1.5, 2.9}) {
            EXPECT_NEAR(t_cdf(t, df), t_cdf_by_quadrature(t, df), 1e-9) << df << " " << t;
        }
    }
}

TEST(TDistribution, KnownValues) {
    // df = 1 is Cauchy: F(t) = 1/2 + atan(t)/pi.
    EXPECT_NEAR(t_cdf(1.3, 1), 0.5 + std::atan(1.3) / M_PI, 1e-13);
    // df = 2: F(t) = 1/2 + t / (2 sqrt(2 + t^2)).
    EXPECT_NEAR(t_cdf(-0.8, 2), 0.5 - 0.8 / (2 * std::sqrt(2.64)), 1e-13);
    EXPECT_NEAR(t_quantile(0.90, 4), 1.5332062740589432, 1e-6);
    EXPECT_NEAR(t_quantile(0.975, 10), 2.2281388519649385, 1e-6);
}

TEST(TDistribution, QuantileInvertsCdf) {
    for (double df : {1.0, 3.0, 4.0, 12.0}) {
        for (double p : {0.01, 0.2, 0.5, 0.9, 0.999}) EXPECT_NEAR(t_cdf(t_quantile(p, df), df), p, 1e-12);
    }
    EXPECT_THROW(t_quantile(0.0, 4), std::invalid_argument);
    EXPECT_THROW(t_cdf(1.0, 0.0), std::invalid_argument);
}

TEST(IncompleteBeta, Symmetry) {
    for (double x : {0.1, 0.37, 0.8}) {
        EXPECT_NEAR(incomplete_beta(2.5, 1.5, x), 1 - incomplete_beta(1.5, 2.5, 1 - x), 1e-13);
    }
    EXPECT_NEAR(incomplete_beta(1, 1, 0.3), 0.3, 1e-14);
    EXPECT_NEAR(incomplete_beta(2, 1, 0.3), 0.09, 1e-14);
}

TEST(PairedTTest, ReferenceDifferences) {
    const auto r = paired_t_test(kDifferences, 0.10);
    EXPECT_NEAR(r.t, 2.935, 1e-3);
    EXPECT_EQ(r.df, 4);
    EXPECT_NEAR(r.critical_value, 1.5332062740589432, 1e-6);
    EXPECT_TRUE(r.significant);
    EXPECT_NEAR(r.mean, 0.08, 1e-12);
}

TEST(PairedTTest, NegatedDifferencesNegateT) {
    std::vector<double> neg;
    for (double e : kDifferences) neg.push_back(-e);
    const auto a = paired_t_test(kDifferences);
    const auto b = paired_t_test(neg);
    EXPECT_EQ(b.t, -a.t);
    EXPECT_FALSE(b.significant);
}

TEST(PairedTTest, ScaleInvariant) {
    for (double c : {0.001, 3.0, 1e6}) {
        std::vector<double> s;
        for (double e : kDifferences) s.push_back(c * e);
        EXPECT_NEAR(paired_t_test(s).t, paired_t_test(kDifferences).t, 1e-12);
    }
}

TEST(PairedTTest, DegenerateInputsAreErrors) {
    EXPECT_THROW(paired_t_test(std::vector<double>{0.1, 0.1, 0.1}), DataError);
    EXPECT_THROW(paired_t_test(std::vector<double>{0.1}), DataError);
}

TEST(HypothesisMatrix, ReferenceHitMatrices) {
    const auto m = cycle_hypothesis_matrix(yieldcycle::testing::reference_hit_matrices(), 0.10);
    EXPECT_EQ(m.countries.size(), 5u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_FALSE(m.cells[i][i].has_value());
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            ASSERT_TRUE(m.cells[i][j].has_value());
            const auto& cell = *m.cells[i][j];
            ASSERT_TRUE(cell.result.has_value()) << cell.error;
            EXPECT_EQ(cycle_index(cell.appropriate), i);
            EXPECT_EQ(cycle_index(cell.alternative), j);
            EXPECT_NEAR(cell.result->t, yieldcycle::testing::reference_t_score(i, j), 0.01) << i << "," << j;
            EXPECT_EQ(cell.result->significant, i == 1) << i << "," << j;
        }
    }
}

TEST(HypothesisMatrix, IdenticalRowsRecordPerCellErrors) {
    std::map<std::string, HitMatrix> mats;
    for (const char* c : {"A", "B", "C"}) mats[c] = {{{0.8, 0.8, 0.8}, {0.8, 0.8, 0.8}, {0.8, 0.8, 0.8}}};
    const auto m = cycle_hypothesis_matrix(mats);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) {
                EXPECT_FALSE(m.cells[i][j]->result.has_value());
                EXPECT_FALSE(m.cells[i][j]->error.empty());
            }
    std::ostringstream s;
    write_hypothesis_csv(s, m);
    EXPECT_EQ(s.str().rfind("appropriate,alternative,test_set,t,df,critical_value,significant\n", 0), 0u);
}

TEST(HypothesisMatrix, CsvRowsInRowMajorOrder) {
    const auto m = cycle_hypothesis_matrix(yieldcycle::testing::reference_hit_matrices());
    std::ostringstream s;
    write_hypothesis_csv(s, m);
    std::istringstream in(s.str());
    std::string line;
    std::getline(in, line);
    std::vector<std::string> prefixes;
    while (std::getline(in, line)) prefixes.push_back(line.substr(0, line.find(',', line.find(',') + 1)));
    EXPECT_EQ(prefixes, (std::vector<std::string>{"MC1,MC2", "MC1,MC3", "MC2,MC1", "MC2,MC3", "MC3,MC1", "MC3,MC2"}));
}

TEST(Pearson, Examples) {
    const std::vector<double> x = {1, 2, 3, 4};
    EXPECT_NEAR(pearson(x, std::vector<double>{1, 3, 2, 4}), 0.8, 1e-12);
    EXPECT_NEAR(pearson(x, std::vector<double>{3, 5, 7, 9}), 1.0, 1e-12);
    EXPECT_NEAR(pearson(x, std::vector<double>{-1, -2, -3, -4}), -1.0, 1e-12);
    EXPECT_THROW(pearson(x, std::vector<double>{2, 2, 2, 2}), DataError);
    EXPECT_THROW(pearson(x, std::vector<double>{1, 2}), DataError);
}

TEST(Pearson, BoundedAndAffineInvariant) {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(30), y(30), ya(30);
        for (int i = 0; i < 30; ++i) {
            x[i] = rng.normal();
            y[i] = 0.3 * x[i] + rng.normal();
            ya[i] = 7.5 * y[i] - 3.0;
        }
        const double r = pearson(x, y);
        EXPECT_LE(std::abs(r), 1.0);
        EXPECT_NEAR(pearson(x, ya), r, 1e-12);
    }
}

TEST(Mic, IdentityScoresOne) {
    std::vector<double> x(100);
    for (int i = 0; i < 100; ++i) x[i] = i * 0.37 + std::sin(i);
    EXPECT_GE(mic(x, x), 0.99);
}

TEST(Mic, MatchesReferenceOracle) {
    for (const auto& f : yieldcycle::testing::load_mic_fixtures()) {
        EXPECT_NEAR(mic(f.x, f.y), f.mic, 0.02) << f.name;
    }
}

TEST(Mic, InvariantUnderMonotoneTransforms) {
    for (const auto& f : yieldcycle::testing::load_mic_fixtures()) {
        std::vector<double> xm, ym;
        for (double v : f.x) xm.push_back(std::exp(3 * v));
        for (double v : f.y) ym.push_back(v * v * v);
        EXPECT_NEAR(mic(xm, ym), f.mic_monotone, 0.02) << f.name;
        EXPECT_NEAR(mic(xm, ym), mic(f.x, f.y), 0.02) << f.name;
    }
}

TEST(Mic, SymmetricAndBounded) {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(120), y(120);
        for (int i = 0; i < 120; ++i) {
            x[i] = rng.normal();
            y[i] = trial % 2 ? std::cos(3 * x[i]) + 0.2 * rng.normal() : rng.normal();
        }
        const double a = mic(x, y), b = mic(y, x);
        EXPECT_NEAR(a, b, 1e-9);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0);
    }
}

TEST(Mic, IndependentNoiseScoresLow) {
    Rng rng(5);
    std::vector<double> x(500), y(500);
    for (int i = 0; i < 500; ++i) {
        x[i] = rng.uniform();
        y[i] = rng.uniform();
    }
    EXPECT_LE(mic(x, y), 0.3);
}

TEST(Mic, DegenerateInputs) {
    std::vector<double> x(40), c(40, 2.0);
    for (int i = 0; i < 40; ++i) x[i] = i;
    EXPECT_EQ(mic(x, c), 0.0);
    EXPECT_THROW(mic(std::vector<double>(10, 1.0), std::vector<double>(10, 1.0)), DataError);
    EXPECT_THROW(mic(x, std::vector<double>(39, 1.0)), DataError);
}

TEST(CorrelationReport, IdenticalFeaturesAndRowOrder) {
    std::vector<AsgFeaturePair> pairs(2);
    Rng rng(6);
    pairs[0].code = IndicatorCode::MP4;
    pairs[1].code = IndicatorCode::FF1;
    for (auto& p : pairs) {
        p.level.start = Month(1990, 1);
        p.change.start = Month(1990, 2);
        for (int i = 0; i < 500; ++i) {
            p.level.final.push_back(rng.normal());
            p.change.final.push_back(rng.normal());
        }
    }
    // MP4: change equals level on the common months (shifted one month).
    for (int i = 0; i + 1 < 500; ++i) pairs[0].change.final[i] = pairs[0].level.final[i + 1];
    const auto r = correlation_report("US", pairs);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.rows[0].code, IndicatorCode::MP4);
    EXPECT_EQ(r.rows[0].points, 499u);
    EXPECT_NEAR(r.rows[0].pcc, 1.0, 1e-12);
    EXPECT_GE(r.rows[0].mic, 0.99);
    EXPECT_LE(std::abs(r.rows[1].pcc), 0.15);
    std::ostringstream s;
    write_correlation_csv(s, r);
    EXPECT_EQ(s.str().rfind("code,points,pcc,mic\nMP4,499,", 0), 0u);
}

TEST(ImportanceHeatmap, RowsNormalizedAndShaped) {
    std::map<std::pair<std::string, Cycle>, TrainedModel> models;
    Rng rng(14);
    for (const char* country : {"UK", "GRM"}) {
        for (auto cycle : {Cycle::MC1, Cycle::MC2}) {
            Eigen::MatrixXd X(150, 3);
            std::vector<int> y;
            for (int i = 0; i < 150; ++i) {
                y.push_back(rng.uniform() < 0.5 ? 1 : -1);
                X(i, 0) = rng.normal();
                X(i, 1) = y.back() + 0.1 * rng.normal();
                X(i, 2) = rng.normal();
            }
            const auto d = Dataset::from_arrays(X, y, {"a", "planted", "c"}, {country, cycle});
            models[{country, cycle}] = train({"GradientBoosting", {{"n_estimators", 30}}}, d, 1);
        }
    }
    const auto tables = importance_heatmap(models);
    ASSERT_EQ(tables.size(), 2u);
    for (const auto& [cycle, t] : tables) {
        EXPECT_EQ(t.features, (std::vector<std::string>{"a", "planted", "c"}));
        EXPECT_EQ(t.countries.size(), 2u);
        for (const auto& row : t.values) {
            double sum = 0;
            for (double v : row) {
                EXPECT_GE(v, 0.0);
                sum += v;
            }
            EXPECT_NEAR(sum, 1.0, 1e-6);
            EXPECT_EQ(std::max_element(row.begin(), row.end()) - row.begin(), 1);
        }
        std::ostringstream s;
        write_importance_csv(s, t);
        EXPECT_EQ(s.str().rfind("country,a,planted,c\n", 0), 0u);
    }
}

TEST(ImportanceHeatmap, MismatchedFeaturesOrKindsAreErrors) {
    const auto a = Dataset::from_arrays(yieldcycle::testing::cluster_dataset(40, 2, 6, 1).features,
                                        yieldcycle::testing::cluster_dataset(40, 2, 6, 1).labels, {"x", "y"});
    const auto b = Dataset::from_arrays(a.features, a.labels, {"x", "z"});
    std::map<std::pair<std::string, Cycle>, TrainedModel> models;
    models[{"UK", Cycle::MC1}] = train({"GradientBoosting", {{"n_estimators", 5}}}, a, 1);
    models[{"GRM", Cycle::MC1}] = train({"GradientBoosting", {{"n_estimators", 5}}}, b, 1);
    EXPECT_THROW(importance_heatmap(models), DataError);
    models.erase({"GRM", Cycle::MC1});
    models[{"GRM", Cycle::MC1}] = train({"Ridge", {}}, a, 1);
    EXPECT_THROW(importance_heatmap(models), DataError);
}
