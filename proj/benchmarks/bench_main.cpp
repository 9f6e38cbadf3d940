#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <vector>

#include "yieldcycle/asg.hpp"
#include "yieldcycle/classifier.hpp"
#include "yieldcycle/mic.hpp"
#include "yieldcycle/random.hpp"
#include "yieldcycle/savgol.hpp"

namespace {

using namespace yieldcycle;

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    double x = 0.0;
    for (auto& e : v) {
        x += rng.normal();
        e = x;
    }
    return v;
}

Dataset clusters(std::size_t n, std::size_t dims, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = i % 2 == 0 ? 1 : -1;
        for (std::size_t j = 0; j < dims; ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal() + (j == 0 ? 1.5 * y[i] : 0.0);
        }
    }
    return Dataset::from_arrays(std::move(X), std::move(y));
}

void BM_SavgolFilter(benchmark::State& state) {
    const auto x = random_walk(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(savgol_filter(x, 13, 3));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SavgolFilter)->Arg(456)->Arg(10000);

void BM_AsgTransform(benchmark::State& state) {
    IndicatorSeries s{"XX", IndicatorCode::FF1, {Month(1980, 1), random_walk(456, 2)}};
    for (auto _ : state) benchmark::DoNotOptimize(asg_transform(s));
}
BENCHMARK(BM_AsgTransform);

void BM_Mic(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = random_walk(n, 3);
    auto y = random_walk(n, 4);
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
    for (auto _ : state) benchmark::DoNotOptimize(mic(x, y));
}
BENCHMARK(BM_Mic)->Arg(200)->Arg(456)->Arg(1000);

void BM_Train(benchmark::State& state, const char* kind) {
    const auto data = clusters(200, 17, 5);
    for (auto _ : state) benchmark::DoNotOptimize(train({kind, {}}, data, 9));
}
BENCHMARK_CAPTURE(BM_Train, gradient_boosting, "GradientBoosting")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Train, random_forest, "RandomForest")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Train, logistic, "LogisticRegression")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Train, lda, "LDA");

void BM_KnnPredict(benchmark::State& state) {
    const auto data = clusters(static_cast<std::size_t>(state.range(0)), 17, 6);
    const auto model = train({"KNN", {}}, data, 1);
    for (auto _ : state) benchmark::DoNotOptimize(model.predict_rows(data.features));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KnnPredict)->Arg(200)->Arg(1000);

} // namespace

BENCHMARK_MAIN();
