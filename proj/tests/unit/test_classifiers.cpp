#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_support.hpp"
#include "yieldcycle/classifier.hpp"
#include "yieldcycle/error.hpp"
#include "yieldcycle/validation.hpp"

using namespace yieldcycle;
using yieldcycle::testing::cluster_dataset;

namespace {

std::vector<double> row(const Dataset& d, std::size_t i) {
    std::vector<double> x(d.cols());
    for (std::size_t j = 0; j < d.cols(); ++j) x[j] = d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return x;
}

/// All-pairs scan in plain loops; distance ties to the lower index, vote ties to +1.
int knn_oracle(const Dataset& train, std::span<const double> q, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < train.rows(); ++i) {
        double s = 0;
        for (std::size_t j = 0; j < train.cols(); ++j) {
            const double diff = train.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - q[j];
            s += diff * diff;
        }
        d.push_back({s, i});
    }
    std::sort(d.begin(), d.end());
    int votes = 0;
    for (std::size_t i = 0; i < std::min(k, d.size()); ++i) votes += train.labels[d[i].second];
    return votes >= 0 ? 1 : -1;
}

class EveryKind : public ::testing::TestWithParam<std::string> {};

} // namespace

TEST(Registry, BuiltInKindsInOrder) {
    const auto names = ClassifierRegistry::global().names();
    const std::vector<std::string> expected = {"LDA", "Ridge", "LogisticRegression", "KNN", "RandomForest", "GradientBoosting"};
    ASSERT_GE(names.size(), expected.size());
    EXPECT_TRUE(std::equal(expected.begin(), expected.end(), names.begin()));
    EXPECT_EQ(default_specs().size(), 6u);
}

TEST(Registry, UnknownKindAndParameterAreErrors) {
    EXPECT_THROW(resolve({"SVM", {}}), DataError);
    EXPECT_THROW(resolve({"KNN", {{"gamma", 1.0}}}), DataError);
    EXPECT_THROW(resolve({"KNN", {{"n_neighbors", 0.0}}}), DataError);
}

TEST(Registry, SpecIdIsCanonical) {
    EXPECT_EQ((ClassifierSpec{"KNN", {{"n_neighbors", 9}}}.id()), "KNN(n_neighbors=9)");
    EXPECT_EQ((ClassifierSpec{"Ridge", {}}.id()), "Ridge");
    EXPECT_EQ((ClassifierSpec{"X", {{"b", 2}, {"a", 0.5}}}.id()), "X(a=0.5,b=2)");
}

TEST(Registry, NewKindsCanBeAdded) {
    auto& reg = ClassifierRegistry::global();
    if (!reg.contains("ConstantUp")) {
        ClassifierKind k;
        k.name = "ConstantUp";
        k.trainer = [](const Eigen::MatrixXd&, std::span<const int>, const Hyperparams&, std::uint64_t) -> std::unique_ptr<Model> {
            return std::make_unique<yieldcycle::testing::FunctionModel>([](std::span<const double>) { return 1.0; });
        };
        k.loader = [](std::string_view) -> std::unique_ptr<Model> {
            return std::make_unique<yieldcycle::testing::FunctionModel>([](std::span<const double>) { return 1.0; });
        };
        k.validate = [](const Hyperparams&) {};
        k.allows_single_class = true;
        reg.add(k);
    }
    const auto d = cluster_dataset(20, 2, 6, 1);
    const auto m = train({"ConstantUp", {}}, d, 0);
    EXPECT_EQ(m.predict(row(d, 1)), 1);
}

TEST_P(EveryKind, SeparatesWellSeparatedClusters) {
    const auto d = cluster_dataset(200, 3, 6.0, 21);
    const auto m = train({GetParam(), {}}, d, 5);
    const auto pred = m.predict_rows(d.features);
    EXPECT_GE(hit_rate(pred, d.labels), 0.95);
    // Cluster centers get their cluster's label.
    const double c = 3.0 / std::sqrt(3.0);
    EXPECT_EQ(m.predict(std::vector<double>{c, c, c}), 1);
    EXPECT_EQ(m.predict(std::vector<double>{-c, -c, -c}), -1);
}

TEST_P(EveryKind, DimensionMismatchIsError) {
    const auto m = train({GetParam(), {}}, cluster_dataset(60, 3, 6.0, 2), 1);
    EXPECT_THROW(m.predict(std::vector<double>{1.0, 2.0}), DataError);
    EXPECT_THROW(m.predict_rows(Eigen::MatrixXd::Zero(2, 4)), DataError);
}

TEST_P(EveryKind, TrainingAndPredictionAreDeterministic) {
    const auto d = yieldcycle::testing::shuffled_labels(cluster_dataset(120, 4, 1.0, 3), 8);
    const auto a = train({GetParam(), {}}, d, 77);
    const auto b = train({GetParam(), {}}, d, 77);
    EXPECT_EQ(save_model(a), save_model(b));
    for (std::size_t i = 0; i < d.rows(); ++i) {
        const auto x = row(d, i);
        EXPECT_EQ(a.model->decision(x), a.model->decision(x));
        EXPECT_EQ(a.model->decision(x), b.model->decision(x));
    }
}

TEST_P(EveryKind, SaveLoadRoundTripPreservesDecisions) {
    const auto d = yieldcycle::testing::shuffled_labels(cluster_dataset(80, 3, 2.0, 4), 9);
    const auto m = train({GetParam(), {}}, d, 3);
    const auto text = save_model(m);
    const auto back = load_model(text);
    EXPECT_EQ(back.spec, m.spec);
    EXPECT_EQ(back.feature_names, m.feature_names);
    EXPECT_EQ(save_model(back), text);
    for (std::size_t i = 0; i < d.rows(); ++i) {
        const auto x = row(d, i);
        EXPECT_EQ(back.model->decision(x), m.model->decision(x));
    }
}

TEST_P(EveryKind, SingleClassDataFailsUnlessAllowed) {
    auto d = cluster_dataset(20, 2, 6.0, 1);
    std::fill(d.labels.begin(), d.labels.end(), 1);
    if (ClassifierRegistry::global().get(GetParam()).allows_single_class) {
        EXPECT_EQ(train({GetParam(), {}}, d, 1).predict_rows(d.features), d.labels);
    } else {
        EXPECT_THROW(train({GetParam(), {}}, d, 1), DataError);
    }
}

INSTANTIATE_TEST_SUITE_P(Kinds, EveryKind,
                         ::testing::Values("LDA", "Ridge", "LogisticRegression", "KNN", "RandomForest",
                                           "GradientBoosting"));

TEST(Knn, OneNeighbourReproducesTrainingLabels) {
    const auto d = yieldcycle::testing::shuffled_labels(cluster_dataset(150, 3, 0.5, 6), 2);
    const auto m = train({"KNN", {{"n_neighbors", 1}}}, d, 0);
    EXPECT_EQ(m.predict_rows(d.features), d.labels);
}

TEST(Knn, MatchesBruteForceOracle) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto d = yieldcycle::testing::shuffled_labels(cluster_dataset(200, 3, 1.0, seed), seed + 100);
        const auto queries = cluster_dataset(200, 3, 1.0, seed + 50);
        for (int k : {1, 5, 9, 15}) {
            const auto m = train({"KNN", {{"n_neighbors", static_cast<double>(k)}}}, d, 0);
            for (std::size_t i = 0; i < queries.rows(); ++i) {
                const auto q = row(queries, i);
                ASSERT_EQ(m.predict(q), knn_oracle(d, q, static_cast<std::size_t>(k))) << "k=" << k << " row " << i;
            }
        }
    }
}

TEST(Ridge, FeatureEqualToLabelIsExact) {
    Eigen::MatrixXd X(30, 1);
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
        y.push_back(i % 3 == 0 ? 1 : -1);
        X(i, 0) = y.back();
    }
    const auto d = Dataset::from_arrays(X, y);
    EXPECT_EQ(train({"Ridge", {}}, d, 0).predict_rows(d.features), y);
}

TEST(Lda, UnshrunkDecisionsInvariantUnderAffineMaps) {
    const auto d = yieldcycle::testing::shuffled_labels(cluster_dataset(200, 3, 1.5, 12), 1);
    Eigen::Matrix3d A;
    A << 2.0, 0.3, -0.1, 0.0, 0.5, 0.2, 1.0, 0.0, 3.0;
    const Eigen::RowVector3d b(5.0, -2.0, 0.5);
    auto mapped = d;
    mapped.features = (d.features * A.transpose()).rowwise() + b;
    const ClassifierSpec spec{"LDA", {{"shrinkage", 0.0}}};
    const auto m1 = train(spec, d, 0);
    const auto m2 = train(spec, mapped, 0);
    const auto test = cluster_dataset(300, 3, 1.5, 99);
    const Eigen::MatrixXd test_mapped = (test.features * A.transpose()).rowwise() + b;
    const auto p1 = m1.predict_rows(test.features);
    const auto p2 = m2.predict_rows(test_mapped);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < p1.size(); ++i) agree += p1[i] == p2[i];
    EXPECT_EQ(agree, p1.size());
    for (std::size_t i = 0; i < test.rows(); ++i) {
        std::vector<double> a(3), c(3);
        for (int j = 0; j < 3; ++j) {
            a[j] = test.features(static_cast<Eigen::Index>(i), j);
            c[j] = test_mapped(static_cast<Eigen::Index>(i), j);
        }
        EXPECT_NEAR(m1.model->decision(a), m2.model->decision(c), 1e-6);
    }
}

TEST(Lda, ShrinkageOutsideRangeIsError) {
    EXPECT_THROW(resolve({"LDA", {{"shrinkage", 1.5}}}), DataError);
}

TEST(Importance, PlantedFeatureDominates) {
    Rng rng(31);
    Eigen::MatrixXd X(300, 2);
    std::vector<int> y;
    for (int i = 0; i < 300; ++i) {
        y.push_back(rng.uniform() < 0.5 ? 1 : -1);
        X(i, 0) = y.back();
        X(i, 1) = rng.normal();
    }
    const auto d = Dataset::from_arrays(X, y, {"signal", "noise"});
    for (const char* kind : {"GradientBoosting", "RandomForest"}) {
        const auto imp = feature_importance(train({kind, {{"max_features", 2}}}, d, 4));
        ASSERT_EQ(imp.size(), 2u);
        EXPECT_EQ(imp[0].first, "signal");
        EXPECT_GT(imp[0].second, 0.9) << kind;
        EXPECT_GE(imp[1].second, 0.0);
        EXPECT_NEAR(imp[0].second + imp[1].second, 1.0, 1e-6);
    }
}

TEST(Importance, SingleFeatureIsOne) {
    const auto d = cluster_dataset(60, 1, 6.0, 2);
    const auto imp = feature_importance(train({"GradientBoosting", {}}, d, 1));
    ASSERT_EQ(imp.size(), 1u);
    EXPECT_DOUBLE_EQ(imp[0].second, 1.0);
}

TEST(Importance, RowsSumToOneOnRandomData) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto d = yieldcycle::testing::shuffled_labels(cluster_dataset(100, 6, 1.0, seed), seed);
        for (const char* kind : {"GradientBoosting", "RandomForest"}) {
            double sum = 0;
            for (const auto& [name, v] : feature_importance(train({kind, {}}, d, seed))) {
                EXPECT_GE(v, 0.0);
                sum += v;
            }
            EXPECT_NEAR(sum, 1.0, 1e-6);
        }
    }
}

TEST(Importance, LinearKindsAreUnsupported) {
    const auto m = train({"Ridge", {}}, cluster_dataset(40, 2, 6.0, 1), 0);
    EXPECT_THROW(feature_importance(m), DataError);
}

TEST(TreeEnsembles, BeatLinearModelsOnNonlinearSignal) {
    // XOR of two features: no linear boundary separates it.
    Rng rng(17);
    Eigen::MatrixXd X(400, 3);
    std::vector<int> y;
    for (int i = 0; i < 400; ++i) {
        for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform() * 2 - 1;
        y.push_back(X(i, 0) * X(i, 1) > 0 ? 1 : -1);
    }
    const auto d = Dataset::from_arrays(X, y);
    const CvOptions cv{5, CvMode::stratified};
    double worst_tree = 1.0, best_linear = 0.0;
    for (const char* kind : {"RandomForest", "GradientBoosting"})
        worst_tree = std::min(worst_tree, cross_validate({kind, {}}, d, cv, 3).mean_hit_rate);
    for (const char* kind : {"LDA", "Ridge", "LogisticRegression"})
        best_linear = std::max(best_linear, cross_validate({kind, {}}, d, cv, 3).mean_hit_rate);
    EXPECT_GE(worst_tree, best_linear);
}
