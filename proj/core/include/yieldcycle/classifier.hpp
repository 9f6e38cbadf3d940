#pragma once

// Binary (+1 / -1) classifiers behind a name-keyed registry. Six kinds are
// built in; more can be added with ClassifierRegistry::add before training
// starts.

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "yieldcycle/data_ingest.hpp"

namespace yieldcycle {

namespace kinds {
inline constexpr std::string_view lda = "LDA";
inline constexpr std::string_view ridge = "Ridge";
inline constexpr std::string_view logistic = "LogisticRegression";
inline constexpr std::string_view knn = "KNN";
inline constexpr std::string_view random_forest = "RandomForest";
inline constexpr std::string_view gradient_boosting = "GradientBoosting";
} // namespace kinds

using Hyperparams = std::map<std::string, double>;

struct ClassifierSpec {
    std::string kind;
    Hyperparams params; // overrides of the kind's defaults

    /// Canonical text such as `KNN(n_neighbors=9)`; used for seeds and reports.
    std::string id() const;
    bool operator==(const ClassifierSpec&) const = default;
};

/// A fitted decision function. Implementations are immutable after training.
class Model {
public:
    virtual ~Model() = default;
    /// Score whose sign is the prediction; 0 maps to +1.
    virtual double decision(std::span<const double> x) const = 0;
    /// Kind-specific learned parameters as a JSON object.
    virtual std::string save() const = 0;
    /// Raw (unnormalized) impurity decrease per feature, if the kind has one.
    virtual std::optional<std::vector<double>> impurity_importance() const { return std::nullopt; }
};

struct TrainedModel {
    ClassifierSpec spec; // with every hyperparameter resolved
    std::vector<std::string> feature_names;
    Provenance provenance;
    std::shared_ptr<const Model> model;

    /// +1 or -1. Throws DataError if x has the wrong dimension.
    int predict(std::span<const double> x) const;
    std::vector<int> predict_rows(const Eigen::MatrixXd& rows) const;
};

using Trainer = std::function<std::unique_ptr<Model>(const Eigen::MatrixXd& X, std::span<const int> y,
                                                     const Hyperparams& params, std::uint64_t seed)>;
using Loader = std::function<std::unique_ptr<Model>(std::string_view json)>;

struct ClassifierKind {
    std::string name;
    Hyperparams defaults;
    Trainer trainer;
    Loader loader;
    /// Throws DataError for invalid hyperparameters.
    std::function<void(const Hyperparams&)> validate;
    bool allows_single_class = false;
};

class ClassifierRegistry {
public:
    /// Process-wide registry with the six built-in kinds. Mutating it while
    /// other threads train is not supported.
    static ClassifierRegistry& global();

    void add(ClassifierKind kind);
    bool contains(std::string_view name) const;
    const ClassifierKind& get(std::string_view name) const;
    std::vector<std::string> names() const; // registration order

private:
    std::vector<ClassifierKind> kinds_;
};

/// Defaults merged with the spec's overrides, validated.
ClassifierSpec resolve(const ClassifierSpec& spec);

/// The six built-in kinds with default hyperparameters, in registry order.
std::vector<ClassifierSpec> default_specs();

TrainedModel train(const ClassifierSpec& spec, const Dataset& data, std::uint64_t seed);
int predict(const TrainedModel& model, std::span<const double> x);

/// Impurity-decrease importance normalized to sum to 1, in feature order.
/// Only kinds that expose impurity importance (the tree ensembles) qualify.
std::vector<std::pair<std::string, double>> feature_importance(const TrainedModel& model);

/// Versioned, self-describing JSON.
std::string save_model(const TrainedModel& model);
TrainedModel load_model(std::string_view json);

} // namespace yieldcycle
