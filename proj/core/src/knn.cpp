#include <algorithm>
#include "json.hpp"
#include <numeric>

#include "models.hpp"
#include "yieldcycle/error.hpp"

namespace yieldcycle::detail {

namespace {

using nlohmann::json;

/// Brute-force Euclidean k-nearest-neighbour majority vote. Distance ties go
/// to the lower training index.
class KnnModel final : public Model {
public:
    KnnModel(int k, Eigen::MatrixXd X, std::vector<int> y) : k_(k), X_(std::move(X)), y_(std::move(y)) {}

    double decision(std::span<const double> x) const override {
        const auto n = static_cast<std::size_t>(X_.rows());
        const Eigen::Map<const Eigen::RowVectorXd> q(x.data(), static_cast<Eigen::Index>(x.size()));
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t i = 0; i < n; ++i) dist[i] = {(X_.row(static_cast<Eigen::Index>(i)) - q).squaredNorm(), i};
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(k_), n);
        std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());
        double votes = 0.0;
        for (std::size_t i = 0; i < k; ++i) votes += y_[dist[i].second];
        return votes;
    }

    std::string save() const override {
        json rows = json::array();
        for (Eigen::Index i = 0; i < X_.rows(); ++i) {
            json r = json::array();
            for (Eigen::Index j = 0; j < X_.cols(); ++j) r.push_back(X_(i, j));
            rows.push_back(std::move(r));
        }
        return json{{"k", k_}, {"X", rows}, {"y", y_}}.dump();
    }

    static std::unique_ptr<Model> load(std::string_view text) {
        const auto j = json::parse(text);
        const auto rows = j.at("X").get<std::vector<std::vector<double>>>();
        const auto y = j.at("y").get<std::vector<int>>();
        const auto cols = rows.empty() ? 0 : rows.front().size();
        Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t c = 0; c < cols; ++c) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i].at(c);
        }
        return std::make_unique<KnnModel>(j.at("k").get<int>(), std::move(X), y);
    }

private:
    int k_;
    Eigen::MatrixXd X_;
    std::vector<int> y_;
};

} // namespace

ClassifierKind knn_kind() {
    return {std::string(kinds::knn),
            {{"n_neighbors", 9}},
            [](const Eigen::MatrixXd& X, std::span<const int> y, const Hyperparams& p, std::uint64_t) -> std::unique_ptr<Model> {
                return std::make_unique<KnnModel>(int_param(p, "n_neighbors"), X, std::vector<int>(y.begin(), y.end()));
            },
            KnnModel::load,
            [](const Hyperparams& p) {
                const int k = int_param(p, "n_neighbors");
                if (k < 1 || k % 2 == 0) throw DataError("KNN n_neighbors must be odd and >= 1, got " + std::to_string(k));
            },
            true};
}

} // namespace yieldcycle::detail
