#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "iqbench/classifiers/adaboost.hpp"
#include "iqbench/classifiers/fidelity.hpp"
#include "iqbench/classifiers/gaussian_process.hpp"
#include "iqbench/classifiers/naive_bayes.hpp"
#include "iqbench/classifiers/neural_net.hpp"
#include "iqbench/classifiers/random_forest.hpp"
#include "iqbench/classifiers/svm.hpp"
#include "iqbench/iqcore.hpp"

namespace iqbench {

enum class ModelKind {
    FidelityFit,
    LinearSvm,
    RbfSvm,
    NaiveBayes,
    AdaBoost,
    RandomForest,
    GaussianProcess,
    NeuralNet,
};

inline constexpr std::array<ModelKind, 8> kAllModelKinds = {
    ModelKind::FidelityFit,  ModelKind::LinearSvm,    ModelKind::RbfSvm,
    ModelKind::NaiveBayes,   ModelKind::AdaBoost,     ModelKind::RandomForest,
    ModelKind::GaussianProcess, ModelKind::NeuralNet,
};

// Stable machine id ("linear_svm") and report display name ("Linear SVM").
std::string kind_id(ModelKind kind);
std::string kind_display_name(ModelKind kind);
ModelKind kind_from_id(const std::string& id);  // throws ConfigError on unknown ids

struct ClassifierSpec {
    ModelKind kind = ModelKind::FidelityFit;
    nlohmann::json hyperparams = nlohmann::json::object();
    std::uint64_t seed = 0;
};

// Fills defaults and rejects unknown keys, wrong types, and out-of-range
// values. Returns the normalized hyperparams (all keys present). Range checks
// follow the published configuration space; bounds are parameters so a config
// can widen them.
struct SpecBounds {
    int n_estimators_min = 10;
    int n_estimators_max = 200;
    int layer_min = 16;
    int layer_max = 1056;
};
nlohmann::json validate_hyperparams(ModelKind kind, const nlohmann::json& hyperparams,
                                    const SpecBounds& bounds = {});

// Feature-wise affine map fit on the training inputs; identity unless the
// spec sets standardize = true.
struct Standardizer {
    bool enabled = false;
    double mean[2] = {0.0, 0.0};
    double scale[2] = {1.0, 1.0};  // standard deviations, floored at 1e-30

    IQPoint apply(IQPoint p) const {
        if (!enabled) return p;
        return IQPoint{(p.i - mean[0]) / scale[0], (p.q - mean[1]) / scale[1]};
    }
};

// One trained classifier behind a uniform interface. For every kind with a
// probability output, predict is literally predict_proba > 0.5 (ties resolve
// to Ground); FidelityFit predicts through its threshold rule and exposes the
// signed margin as its ROC score.
class TrainedModel {
public:
    using Payload = std::variant<FidelityFitParams, LinearSvmModel, RbfSvmModel, GaussianNbModel,
                                 AdaBoostModel, RandomForestModel, GpModel, NeuralNetModel>;

    TrainedModel(ClassifierSpec spec, Standardizer scaler, Payload payload,
                 nlohmann::json metadata);

    const ClassifierSpec& spec() const { return spec_; }
    ModelKind kind() const { return spec_.kind; }
    std::string display_name() const { return kind_display_name(spec_.kind); }
    bool supports_proba() const { return spec_.kind != ModelKind::FidelityFit; }
    const Standardizer& standardizer() const { return scaler_; }

    // Order-preserving batch APIs; every point must be finite.
    std::vector<StateLabel> predict(const std::vector<IQPoint>& points) const;
    std::vector<double> predict_proba(const std::vector<IQPoint>& points) const;
    std::vector<double> roc_scores(const std::vector<IQPoint>& points) const;

    // Provenance and per-kind annotations (quadrature choice, solver
    // diagnostics, training provenance); serialized with the model.
    const nlohmann::json& metadata() const { return metadata_; }
    void merge_metadata(const nlohmann::json& extra);

    template <class T>
    const T* params() const {
        return std::get_if<T>(&payload_);
    }

    nlohmann::json to_json() const;  // format_version 1
    static TrainedModel from_json(const nlohmann::json& doc);

private:
    ClassifierSpec spec_;
    Standardizer scaler_;
    Payload payload_;
    nlohmann::json metadata_;
};

// Validates the spec, standardizes if requested, and dispatches to the
// kind-specific trainer.
TrainedModel fit(const ClassifierSpec& spec, const Dataset& train);

}  // namespace iqbench
