#include <Eigen/Dense>
#include <cmath>
#include "json.hpp"

#include "models.hpp"
#include "yieldcycle/error.hpp"

namespace yieldcycle::detail {

namespace {

using nlohmann::json;

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// w . x + b for the linear kinds.
class LinearModel final : public Model {
public:
    LinearModel(std::string kind, Eigen::VectorXd coef, double intercept, json extra = json::object())
        : kind_(std::move(kind)), coef_(std::move(coef)), intercept_(intercept), extra_(std::move(extra)) {}

    double decision(std::span<const double> x) const override {
        return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())).dot(coef_) + intercept_;
    }

    std::string save() const override {
        json j = extra_;
        j["coef"] = to_vector(coef_);
        j["intercept"] = intercept_;
        return j.dump();
    }

    static std::unique_ptr<Model> load(std::string kind, std::string_view text) {
        auto j = json::parse(text);
        auto coef = from_vector(j.at("coef").get<std::vector<double>>());
        const double intercept = j.at("intercept").get<double>();
        j.erase("coef");
        j.erase("intercept");
        return std::make_unique<LinearModel>(std::move(kind), std::move(coef), intercept, std::move(j));
    }

private:
    std::string kind_;
    Eigen::VectorXd coef_;
    double intercept_;
    json extra_;
};

void check_two_classes(std::span<const int> y, std::string_view kind) {
    bool pos = false;
    bool neg = false;
    for (int v : y) (v > 0 ? pos : neg) = true;
    if (!(pos && neg)) throw DataError(std::string(kind) + " needs both classes in the training data");
}

Eigen::VectorXd class_mean(const Eigen::MatrixXd& X, std::span<const int> y, int label) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(X.cols());
    double n = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if (y[static_cast<std::size_t>(i)] == label) {
            sum += X.row(i).transpose();
            n += 1;
        }
    }
    return sum / n;
}

/// Shrunk covariance of one class, estimated on standardized columns and
/// mapped back to the original scale.
Eigen::MatrixXd class_covariance(const Eigen::MatrixXd& X, std::span<const int> y, int label, double shrinkage,
                                 double fallback, double& used) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if (y[static_cast<std::size_t>(i)] == label) rows.push_back(i);
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd Xk(n, X.cols());
    for (Eigen::Index r = 0; r < n; ++r) Xk.row(r) = X.row(rows[static_cast<std::size_t>(r)]);
    Xk.rowwise() -= Xk.colwise().mean();

    Eigen::VectorXd scale = (Xk.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
        if (!(scale(j) > 0.0)) scale(j) = 1.0;
    }
    const Eigen::MatrixXd Z = Xk * scale.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd emp = Z.transpose() * Z / static_cast<double>(n);

    used = shrinkage;
    if (shrinkage < 0.0) {
        used = ledoit_wolf_shrinkage(Z);
        if (used < 0.0) {
            if (fallback < 0.0) throw DataError("LDA: Ledoit-Wolf shrinkage is degenerate on this data");
            used = fallback;
        }
    }
    const double mu = emp.trace() / static_cast<double>(emp.rows());
    Eigen::MatrixXd shrunk = (1.0 - used) * emp;
    shrunk.diagonal().array() += used * mu;
    return scale.asDiagonal() * shrunk * scale.asDiagonal();
}

std::unique_ptr<Model> train_lda(const Eigen::MatrixXd& X, std::span<const int> y, const Hyperparams& p, std::uint64_t) {
    check_two_classes(y, kinds::lda);
    const double shrinkage = param(p, "shrinkage");
    const double fallback = param(p, "shrinkage_fallback");
    double n_pos = 0;
    for (int v : y) n_pos += (v > 0);
    const double n = static_cast<double>(y.size());
    const double prior_pos = n_pos / n;
    const double prior_neg = 1.0 - prior_pos;

    double used_pos = 0.0;
    double used_neg = 0.0;
    const Eigen::MatrixXd cov = prior_pos * class_covariance(X, y, 1, shrinkage, fallback, used_pos) +
                                prior_neg * class_covariance(X, y, -1, shrinkage, fallback, used_neg);
    if (cov.isZero(0.0)) throw DataError("LDA: degenerate (all-zero) within-class covariance");

    const Eigen::VectorXd mu_pos = class_mean(X, y, 1);
    const Eigen::VectorXd mu_neg = class_mean(X, y, -1);
    // Minimum-norm solve keeps constant columns at zero weight.
    const Eigen::VectorXd coef = cov.completeOrthogonalDecomposition().solve(mu_pos - mu_neg);
    const double intercept = -0.5 * coef.dot(mu_pos + mu_neg) + std::log(prior_pos / prior_neg);
    return std::make_unique<LinearModel>(std::string(kinds::lda), coef, intercept,
                                         json{{"shrinkage_used", {used_pos, used_neg}}});
}

std::unique_ptr<Model> train_ridge(const Eigen::MatrixXd& X, std::span<const int> y, const Hyperparams& p, std::uint64_t) {
    check_two_classes(y, kinds::ridge);
    const double alpha = param(p, "alpha");
    Eigen::VectorXd target(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) target(i) = y[static_cast<std::size_t>(i)];

    const Eigen::RowVectorXd x_mean = X.colwise().mean();
    const double y_mean = target.mean();
    const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
    Eigen::MatrixXd gram = Xc.transpose() * Xc;
    gram.diagonal().array() += alpha;
    const Eigen::VectorXd rhs = Xc.transpose() * (target.array() - y_mean).matrix();
    const Eigen::VectorXd coef = gram.completeOrthogonalDecomposition().solve(rhs);
    const double intercept = y_mean - x_mean.dot(coef);
    return std::make_unique<LinearModel>(std::string(kinds::ridge), coef, intercept);
}

std::unique_ptr<Model> train_logistic(const Eigen::MatrixXd& X, std::span<const int> y, const Hyperparams& p,
                                      std::uint64_t) {
    check_two_classes(y, kinds::logistic);
    const double C = param(p, "C");
    const double tol = param(p, "tol");
    const int max_iter = int_param(p, "max_iter");
    const auto n = X.rows();
    const auto d = X.cols();
    const double lambda = 1.0 / (C * static_cast<double>(n));

    // Objective: mean log-loss + lambda/2 |w|^2 (intercept unpenalized).
    // Fixed step 1/L with L the gradient's Lipschitz bound.
    Eigen::MatrixXd aug(n, d + 1);
    aug.leftCols(d) = X;
    aug.col(d).setOnes();
    const Eigen::MatrixXd gram = aug.transpose() * aug / static_cast<double>(n);
    const double max_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    const double step = 1.0 / (0.25 * max_eig + lambda);

    Eigen::VectorXd signs(n);
    for (Eigen::Index i = 0; i < n; ++i) signs(i) = y[static_cast<std::size_t>(i)];
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
    int iterations = 0;
    for (; iterations < max_iter; ++iterations) {
        const Eigen::VectorXd margin = signs.cwiseProduct(aug * theta);
        // d/dm log(1 + e^-m) = -1 / (1 + e^m)
        const Eigen::VectorXd weight = margin.unaryExpr([](double m) { return -1.0 / (1.0 + std::exp(m)); });
        Eigen::VectorXd grad = aug.transpose() * weight.cwiseProduct(signs) / static_cast<double>(n);
        grad.head(d) += lambda * theta.head(d);
        if (grad.lpNorm<Eigen::Infinity>() < tol) break;
        theta -= step * grad;
    }
    return std::make_unique<LinearModel>(std::string(kinds::logistic), theta.head(d), theta(d), json{{"iterations", iterations}});
}

} // namespace

double ledoit_wolf_shrinkage(const Eigen::MatrixXd& centered) {
    const double n = static_cast<double>(centered.rows());
    const double p = static_cast<double>(centered.cols());
    const Eigen::MatrixXd X2 = centered.array().square().matrix();
    const Eigen::VectorXd emp_trace = X2.colwise().sum().transpose() / n;
    const double mu = emp_trace.sum() / p;
    const double beta_sum = (X2.transpose() * X2).sum();
    const double delta_sum = (centered.transpose() * centered).array().square().sum() / (n * n);
    double beta = (beta_sum / n - delta_sum) / (p * n);
    double delta = (delta_sum - 2.0 * mu * emp_trace.sum() + p * mu * mu) / p;
    if (!(delta > 0.0) || !std::isfinite(delta)) return -1.0;
    beta = std::min(beta, delta);
    return std::max(beta, 0.0) / delta;
}

ClassifierKind lda_kind() {
    return {std::string(kinds::lda),
            {{"shrinkage", -1.0}, {"shrinkage_fallback", 0.1}},
            train_lda,
            [](std::string_view t) { return LinearModel::load(std::string(kinds::lda), t); },
            [](const Hyperparams& p) {
                const double s = param(p, "shrinkage");
                if (s != -1.0 && (s < 0.0 || s > 1.0)) throw DataError("LDA shrinkage must be -1 (Ledoit-Wolf) or in [0, 1]");
                if (param(p, "shrinkage_fallback") > 1.0) throw DataError("LDA shrinkage_fallback must be <= 1");
            },
            false};
}

ClassifierKind ridge_kind() {
    return {std::string(kinds::ridge),
            {{"alpha", 1.0}},
            train_ridge,
            [](std::string_view t) { return LinearModel::load(std::string(kinds::ridge), t); },
            [](const Hyperparams& p) {
                if (!(param(p, "alpha") >= 0.0)) throw DataError("Ridge alpha must be >= 0");
            },
            false};
}

ClassifierKind logistic_kind() {
    return {std::string(kinds::logistic),
            {{"C", 1.0}, {"tol", 1e-6}, {"max_iter", 10000}},
            train_logistic,
            [](std::string_view t) { return LinearModel::load(std::string(kinds::logistic), t); },
            [](const Hyperparams& p) {
                if (!(param(p, "C") > 0.0)) throw DataError("LogisticRegression C must be > 0");
                if (!(param(p, "tol") > 0.0)) throw DataError("LogisticRegression tol must be > 0");
                if (int_param(p, "max_iter") < 1) throw DataError("LogisticRegression max_iter must be >= 1");
            },
            false};
}

} // namespace yieldcycle::detail
