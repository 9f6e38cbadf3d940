#include "yieldcycle/classifier.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"

#include "csv.hpp"
#include "models.hpp"
#include "yieldcycle/error.hpp"

namespace yieldcycle {

namespace detail {

double param(const Hyperparams& params, const std::string& name) {
    const auto it = params.find(name);
    if (it == params.end()) throw DataError("missing hyperparameter " + name);
    return it->second;
}

int int_param(const Hyperparams& params, const std::string& name) {
    const double v = param(params, name);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw DataError("hyperparameter " + name + " must be an integer");
    return static_cast<int>(v);
}

} // namespace detail

namespace {

constexpr std::string_view kModelFormat = "yieldcycle-model";
constexpr int kModelVersion = 1;

} // namespace

std::string ClassifierSpec::id() const {
    if (params.empty()) return kind;
    std::string out = kind + "(";
    bool first = true;
    for (const auto& [name, value] : params) {
        if (!first) out += ",";
        first = false;
        out += name + "=" + csv::format_double(value);
    }
    return out + ")";
}

ClassifierRegistry& ClassifierRegistry::global() {
    static ClassifierRegistry registry = [] {
        ClassifierRegistry r;
        r.add(detail::lda_kind());
        r.add(detail::ridge_kind());
        r.add(detail::logistic_kind());
        r.add(detail::knn_kind());
        r.add(detail::random_forest_kind());
        r.add(detail::gradient_boosting_kind());
        return r;
    }();
    return registry;
}

void ClassifierRegistry::add(ClassifierKind kind) {
    if (kind.name.empty()) throw std::invalid_argument("classifier kind needs a name");
    if (contains(kind.name)) throw std::invalid_argument("classifier kind already registered: " + kind.name);
    if (!kind.trainer || !kind.loader) throw std::invalid_argument("classifier kind needs a trainer and a loader");
    kinds_.push_back(std::move(kind));
}

bool ClassifierRegistry::contains(std::string_view name) const {
    return std::any_of(kinds_.begin(), kinds_.end(), [&](const ClassifierKind& k) { return k.name == name; });
}

const ClassifierKind& ClassifierRegistry::get(std::string_view name) const {
    for (const auto& k : kinds_) {
        if (k.name == name) return k;
    }
    std::string known;
    for (const auto& k : kinds_) known += (known.empty() ? "" : ", ") + k.name;
    throw DataError("unknown classifier kind '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<std::string> ClassifierRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& k : kinds_) out.push_back(k.name);
    return out;
}

ClassifierSpec resolve(const ClassifierSpec& spec) {
    const auto& kind = ClassifierRegistry::global().get(spec.kind);
    ClassifierSpec out{spec.kind, kind.defaults};
    for (const auto& [name, value] : spec.params) {
        if (!kind.defaults.contains(name)) {
            throw DataError("unknown hyperparameter '" + name + "' for " + spec.kind);
        }
        if (!std::isfinite(value)) throw DataError("hyperparameter " + name + " must be finite");
        out.params[name] = value;
    }
    if (kind.validate) kind.validate(out.params);
    return out;
}

std::vector<ClassifierSpec> default_specs() {
    std::vector<ClassifierSpec> out;
    for (auto name : {kinds::lda, kinds::ridge, kinds::logistic, kinds::knn, kinds::random_forest,
                      kinds::gradient_boosting}) {
        out.push_back(resolve({std::string(name), {}}));
    }
    return out;
}

TrainedModel train(const ClassifierSpec& spec, const Dataset& data, std::uint64_t seed) {
    const auto resolved = resolve(spec);
    const auto& kind = ClassifierRegistry::global().get(resolved.kind);
    data.validate();
    if (!kind.allows_single_class && (data.count(1) == 0 || data.count(-1) == 0)) {
        throw DataError(resolved.kind + " on " + data.provenance.to_string() +
                        ": training data has a single class");
    }
    auto model = kind.trainer(data.features, data.labels, resolved.params, seed);
    return {resolved, data.feature_names, data.provenance, std::shared_ptr<const Model>(std::move(model))};
}

int TrainedModel::predict(std::span<const double> x) const {
    if (x.size() != feature_names.size()) {
        throw DataError("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                        std::to_string(feature_names.size()));
    }
    return model->decision(x) >= 0.0 ? 1 : -1;
}

std::vector<int> TrainedModel::predict_rows(const Eigen::MatrixXd& rows) const {
    if (static_cast<std::size_t>(rows.cols()) != feature_names.size()) {
        throw DataError("feature matrix has " + std::to_string(rows.cols()) + " columns, model expects " +
                        std::to_string(feature_names.size()));
    }
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = rows;
    std::vector<int> out(static_cast<std::size_t>(r.rows()));
    const auto d = static_cast<std::size_t>(r.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = model->decision(std::span<const double>(r.data() + i * d, d)) >= 0.0 ? 1 : -1;
    }
    return out;
}

int predict(const TrainedModel& model, std::span<const double> x) { return model.predict(x); }

std::vector<std::pair<std::string, double>> feature_importance(const TrainedModel& model) {
    auto raw = model.model->impurity_importance();
    if (!raw) throw DataError(model.spec.kind + " does not expose impurity importance");
    if (raw->size() != model.feature_names.size()) {
        throw std::logic_error("importance size does not match the feature count");
    }
    double total = 0.0;
    for (double v : *raw) total += v;
    std::vector<std::pair<std::string, double>> out;
    const double uniform = 1.0 / static_cast<double>(raw->size());
    for (std::size_t j = 0; j < raw->size(); ++j) {
        out.emplace_back(model.feature_names[j], total > 0.0 ? (*raw)[j] / total : uniform);
    }
    return out;
}

std::string save_model(const TrainedModel& model) {
    nlohmann::json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["kind"] = model.spec.kind;
    j["params"] = model.spec.params;
    j["feature_names"] = model.feature_names;
    j["country"] = model.provenance.country;
    j["cycle"] = model.provenance.cycle ? nlohmann::json(std::string(to_string(*model.provenance.cycle)))
                                        : nlohmann::json(nullptr);
    j["model"] = nlohmann::json::parse(model.model->save());
    return j.dump(2);
}

TrainedModel load_model(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("model file is not valid JSON: ") + e.what());
    }
    if (j.value("format", "") != kModelFormat) throw DataError("not a yieldcycle model file");
    if (j.value("version", 0) != kModelVersion) {
        throw DataError("unsupported model version " + j.value("version", nlohmann::json(0)).dump());
    }
    try {
        TrainedModel m;
        m.spec.kind = j.at("kind").get<std::string>();
        m.spec.params = j.at("params").get<Hyperparams>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.provenance.country = j.at("country").get<std::string>();
        if (!j.at("cycle").is_null()) m.provenance.cycle = parse_cycle(j.at("cycle").get<std::string>());
        const auto& kind = ClassifierRegistry::global().get(m.spec.kind);
        m.model = std::shared_ptr<const Model>(kind.loader(j.at("model").dump()));
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

} // namespace yieldcycle
