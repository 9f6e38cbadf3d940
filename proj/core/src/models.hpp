#pragma once

// Built-in classifier kinds. Each factory returns the registry entry
// (defaults, trainer, loader, validator).

#include <string>

#include "yieldcycle/classifier.hpp"

namespace yieldcycle::detail {

ClassifierKind lda_kind();
ClassifierKind ridge_kind();
ClassifierKind logistic_kind();
ClassifierKind knn_kind();
ClassifierKind random_forest_kind();
ClassifierKind gradient_boosting_kind();

double param(const Hyperparams& params, const std::string& name);
int int_param(const Hyperparams& params, const std::string& name);

/// Ledoit-Wolf shrinkage intensity for already-centered rows. Returns a
/// negative value when the estimate is degenerate (zero dispersion).
double ledoit_wolf_shrinkage(const Eigen::MatrixXd& centered);

} // namespace yieldcycle::detail
