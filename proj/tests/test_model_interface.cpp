#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "iqbench/classifiers/model.hpp"
#include "support/fixtures.hpp"

using namespace iqbench;
using nlohmann::json;

namespace {

ClassifierSpec spec_of(ModelKind kind, json hp = json::object(), std::uint64_t seed = 7) {
    return ClassifierSpec{kind, std::move(hp), seed};
}

// Small-but-legal hyperparams so the slow trainers stay fast in unit tests.
json fast_hp(ModelKind kind) {
    switch (kind) {
        case ModelKind::AdaBoost:
            return {{"n_estimators", 20}};
        case ModelKind::RandomForest:
            return {{"n_estimators", 10}};
        case ModelKind::NeuralNet:
            return {{"epochs", 40}, {"learning_rate", 5e-3}};
        default:
            return json::object();
    }
}

double accuracy_on(const TrainedModel& model, const Dataset& data) {
    const std::vector<StateLabel> pred = model.predict(iqtest::points_of(data));
    const std::vector<StateLabel> truth = iqtest::labels_of(data);
    std::size_t correct = 0;
    for (std::size_t k = 0; k < pred.size(); ++k) correct += pred[k] == truth[k];
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace

TEST_CASE("kind ids and display names round-trip") {
    for (const ModelKind kind : kAllModelKinds) {
        CHECK(kind_from_id(kind_id(kind)) == kind);
        CHECK(!kind_display_name(kind).empty());
    }
    CHECK(kind_id(ModelKind::LinearSvm) == "linear_svm");
    CHECK(kind_display_name(ModelKind::LinearSvm) == "Linear SVM");
    CHECK_THROWS_AS(kind_from_id("perceptron"), ConfigError);
}

TEST_CASE("every kind learns a separable problem through the facade") {
    const Dataset data = iqtest::separable_fixture(100, 11);
    for (const ModelKind kind : kAllModelKinds) {
        CAPTURE(kind_id(kind));
        const TrainedModel model = fit(spec_of(kind, fast_hp(kind)), data);
        CHECK(accuracy_on(model, data) >= 0.95);
    }
}

TEST_CASE("predict is the 0.5 threshold on predict_proba") {
    const Dataset data = iqtest::make_blobs(80, {0.0, 0.0}, {1.8, 0.0}, 1.0, 3);
    const std::vector<IQPoint> probes = iqtest::probe_grid(9, 4.0);
    for (const ModelKind kind : kAllModelKinds) {
        if (kind == ModelKind::FidelityFit) continue;
        CAPTURE(kind_id(kind));
        const TrainedModel model = fit(spec_of(kind, fast_hp(kind)), data);
        const std::vector<StateLabel> pred = model.predict(probes);
        const std::vector<double> proba = model.predict_proba(probes);
        REQUIRE(pred.size() == probes.size());
        REQUIRE(proba.size() == probes.size());
        for (std::size_t k = 0; k < probes.size(); ++k) {
            CHECK(proba[k] >= 0.0);
            CHECK(proba[k] <= 1.0);
            CHECK(pred[k] == (proba[k] > 0.5 ? StateLabel::Excited : StateLabel::Ground));
        }
    }
}

TEST_CASE("fidelity fit has no probabilities but scores by margin") {
    const Dataset data = iqtest::separable_fixture(60, 19);
    const TrainedModel model = fit(spec_of(ModelKind::FidelityFit), data);
    CHECK(!model.supports_proba());
    CHECK_THROWS_AS(model.predict_proba({{0.0, 0.0}}), ProbaUnsupportedError);

    const std::vector<IQPoint> probes = iqtest::probe_grid(5, 4.0);
    const std::vector<double> scores = model.roc_scores(probes);
    const std::vector<StateLabel> pred = model.predict(probes);
    const FidelityFitParams* p = model.params<FidelityFitParams>();
    REQUIRE(p != nullptr);
    for (std::size_t k = 0; k < probes.size(); ++k) {
        CHECK(scores[k] == p->margin(probes[k]));
        CHECK(pred[k] == (scores[k] > 0.0 ? StateLabel::Excited : StateLabel::Ground));
    }
}

TEST_CASE("roc scores equal probabilities for probabilistic kinds") {
    const Dataset data = iqtest::make_blobs(60, {0.0, 0.0}, {2.0, 0.0}, 1.0, 29);
    const std::vector<IQPoint> probes = iqtest::probe_grid(5, 3.0);
    for (const ModelKind kind : {ModelKind::NaiveBayes, ModelKind::RbfSvm, ModelKind::NeuralNet}) {
        const TrainedModel model = fit(spec_of(kind, fast_hp(kind)), data);
        CHECK(model.roc_scores(probes) == model.predict_proba(probes));
    }
}

TEST_CASE("serialization round-trips exactly, in memory and through text") {
    const Dataset data = iqtest::make_blobs(50, {0.0, 0.0}, {2.0, 0.5}, 0.9, 31);
    const std::vector<IQPoint> probes = iqtest::probe_grid(7, 4.0);
    for (const ModelKind kind : kAllModelKinds) {
        CAPTURE(kind_id(kind));
        const TrainedModel model = fit(spec_of(kind, fast_hp(kind)), data);
        const json doc = model.to_json();
        CHECK(doc.at("format_version").get<int>() == 1);

        const TrainedModel direct = TrainedModel::from_json(doc);
        const TrainedModel texted = TrainedModel::from_json(json::parse(doc.dump()));
        CHECK(direct.kind() == kind);

        const std::vector<double> s0 = model.roc_scores(probes);
        CHECK(direct.roc_scores(probes) == s0);
        CHECK(texted.roc_scores(probes) == s0);
        const std::vector<StateLabel> p0 = model.predict(probes);
        CHECK(direct.predict(probes) == p0);
        CHECK(texted.predict(probes) == p0);
        CHECK(texted.metadata() == model.metadata());
    }
}

TEST_CASE("infinite stump thresholds survive the JSON text round-trip") {
    // Three coincident points: the only usable stump is the constant
    // majority vote, whose threshold is +inf — JSON has no literal for that.
    std::vector<LabeledShot> shots{{{1.0, 1.0}, StateLabel::Ground},
                                   {{1.0, 1.0}, StateLabel::Ground},
                                   {{1.0, 1.0}, StateLabel::Excited}};
    const TrainedModel model =
        fit(spec_of(ModelKind::AdaBoost, {{"n_estimators", 10}}), Dataset(std::move(shots)));
    const AdaBoostModel* fitted = model.params<AdaBoostModel>();
    REQUIRE(fitted != nullptr);
    REQUIRE(!fitted->rounds.empty());
    for (const auto& round : fitted->rounds) REQUIRE(std::isinf(round.stump.threshold));

    const TrainedModel back = TrainedModel::from_json(json::parse(model.to_json().dump()));
    const AdaBoostModel* restored = back.params<AdaBoostModel>();
    REQUIRE(restored != nullptr);
    REQUIRE(restored->rounds.size() == fitted->rounds.size());
    for (std::size_t k = 0; k < restored->rounds.size(); ++k)
        CHECK(restored->rounds[k].stump.threshold == fitted->rounds[k].stump.threshold);
    CHECK(back.predict({{1.0, 1.0}}) == model.predict({{1.0, 1.0}}));
}

TEST_CASE("fitting is deterministic given spec and seed") {
    const Dataset data = iqtest::make_blobs(60, {0.0, 0.0}, {1.5, 0.3}, 1.0, 37);
    for (const ModelKind kind : kAllModelKinds) {
        CAPTURE(kind_id(kind));
        const TrainedModel a = fit(spec_of(kind, fast_hp(kind), 99), data);
        const TrainedModel b = fit(spec_of(kind, fast_hp(kind), 99), data);
        CHECK(a.to_json().dump() == b.to_json().dump());
    }
}

TEST_CASE("single-class data is rejected by every kind") {
    std::vector<LabeledShot> shots;
    for (int k = 0; k < 10; ++k)
        shots.push_back({{static_cast<double>(k), 0.0}, StateLabel::Ground});
    const Dataset ground_only(std::move(shots));
    for (const ModelKind kind : kAllModelKinds) {
        CAPTURE(kind_id(kind));
        CHECK_THROWS_AS(fit(spec_of(kind, fast_hp(kind)), ground_only), EmptyClassError);
    }
}

TEST_CASE("hyperparameter validation fills defaults and rejects junk") {
    // Defaults, spot-checked per kind.
    const json lin = validate_hyperparams(ModelKind::LinearSvm, json::object());
    CHECK(lin.at("C") == 1.0);
    CHECK(lin.at("standardize") == false);
    const json rbf = validate_hyperparams(ModelKind::RbfSvm, json::object());
    CHECK(rbf.at("gamma") == "scale");
    CHECK(rbf.at("degree") == 3);
    const json ada = validate_hyperparams(ModelKind::AdaBoost, json::object());
    CHECK(ada.at("n_estimators") == 50);
    CHECK(ada.at("algorithm") == "SAMME.R");
    CHECK(ada.at("learning_rate") == 1.0);
    const json rf = validate_hyperparams(ModelKind::RandomForest, json::object());
    CHECK(rf.at("criterion") == "gini");
    CHECK(rf.at("max_features") == "sqrt");
    const json gp = validate_hyperparams(ModelKind::GaussianProcess, json::object());
    CHECK(gp.at("signal_variance") == 1.0);
    CHECK(gp.at("jitter") == 1e-10);
    const json nn = validate_hyperparams(ModelKind::NeuralNet, json::object());
    CHECK(nn.at("layer1") == 16);
    CHECK(nn.at("activation") == "relu");
    CHECK(nn.at("optimizer") == "Adam");

    // Unknown keys and out-of-range values.
    CHECK_THROWS_AS(validate_hyperparams(ModelKind::LinearSvm, {{"c", 1.0}}),
                    InvalidHyperparamError);
    CHECK_THROWS_AS(validate_hyperparams(ModelKind::LinearSvm, {{"C", 0.0}}),
                    InvalidHyperparamError);
    CHECK_THROWS_AS(validate_hyperparams(ModelKind::LinearSvm, {{"C", -3.0}}),
                    InvalidHyperparamError);
    CHECK_THROWS_AS(validate_hyperparams(ModelKind::RbfSvm, {{"degree", 5}}),
                    InvalidHyperparamError);
    CHECK_THROWS_AS(validate_hyperparams(ModelKind::RbfSvm, {{"gamma", "auto"}}),
                    InvalidHyperparamError);
    CHECK_THROWS_AS(validate_hyperparams(ModelKind::AdaBoost, {{"n_estimators", 5}}),
                    InvalidHyperparamError);
    CHECK_THROWS_AS(validate_hyperparams(ModelKind::AdaBoost, {{"algorithm", "SAMME.X"}}),
                    InvalidHyperparamError);
    CHECK_THROWS_AS(validate_hyperparams(ModelKind::NeuralNet, {{"layer1", 8}}),
                    InvalidHyperparamError);
    CHECK_THROWS_AS(validate_hyperparams(ModelKind::NeuralNet, {{"activation", "selu"}}),
                    InvalidHyperparamError);

    // Widened bounds admit values the defaults reject.
    SpecBounds wide;
    wide.layer_min = 1;
    const json tiny = validate_hyperparams(ModelKind::NeuralNet, {{"layer1", 2}}, wide);
    CHECK(tiny.at("layer1") == 2);
}

TEST_CASE("batch prediction equals concatenated single calls") {
    const Dataset data = iqtest::make_blobs(40, {0.0, 0.0}, {2.0, 0.0}, 1.0, 43);
    const TrainedModel model = fit(spec_of(ModelKind::RbfSvm), data);
    const std::vector<IQPoint> probes = iqtest::probe_grid(5, 3.0);
    const std::vector<double> batch = model.predict_proba(probes);
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const std::vector<double> one = model.predict_proba({probes[k]});
        REQUIRE(one.size() == 1);
        CHECK(one[0] == batch[k]);
    }
}

TEST_CASE("non-finite probe points are rejected") {
    const Dataset data = iqtest::separable_fixture(30, 5);
    const TrainedModel model = fit(spec_of(ModelKind::NaiveBayes), data);
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(model.predict({{inf, 0.0}}), NonFiniteInputError);
    CHECK_THROWS_AS(model.predict_proba({{0.0, nan}}), NonFiniteInputError);
    CHECK_THROWS_AS(model.roc_scores({{nan, nan}}), NonFiniteInputError);
}

TEST_CASE("standardization is recorded and applied") {
    // Wildly anisotropic input scales; standardization must bring them in.
    Dataset base = iqtest::make_blobs(80, {0.0, 0.0}, {4000.0, 0.002}, 1.0, 53);
    std::vector<LabeledShot> stretched;
    for (const auto& shot : base.shots())
        stretched.push_back({{shot.point.i, shot.point.q * 1e-3}, shot.label});
    const Dataset data(std::move(stretched));

    const TrainedModel model = fit(spec_of(ModelKind::LinearSvm, {{"standardize", true}}), data);
    CHECK(model.standardizer().enabled);
    CHECK(model.metadata().at("standardize") == true);
    CHECK(accuracy_on(model, data) > 0.95);

    const TrainedModel plain = fit(spec_of(ModelKind::LinearSvm), data);
    CHECK(!plain.standardizer().enabled);
}

TEST_CASE("per-kind metadata is recorded") {
    const Dataset data = iqtest::make_blobs(40, {0.0, 0.0}, {2.0, 0.0}, 0.8, 59);
    CHECK(fit(spec_of(ModelKind::FidelityFit), data).metadata().contains("max_cdf_diff"));
    const TrainedModel svm = fit(spec_of(ModelKind::LinearSvm), data);
    CHECK(svm.metadata().contains("smo_iterations"));
    CHECK(svm.metadata().contains("max_kkt_violation"));
    const TrainedModel rbf = fit(spec_of(ModelKind::RbfSvm), data);
    CHECK(rbf.metadata().contains("gamma_resolved"));
    CHECK(rbf.metadata().contains("support_vectors"));
    const TrainedModel ada = fit(spec_of(ModelKind::AdaBoost, fast_hp(ModelKind::AdaBoost)), data);
    CHECK(ada.metadata().contains("rounds_used"));
    CHECK(ada.metadata().contains("fs_bound"));
    const TrainedModel gp = fit(spec_of(ModelKind::GaussianProcess), data);
    CHECK(gp.metadata().at("quadrature") == "simpson-257-8sigma");
    CHECK(gp.metadata().contains("grad_norm"));
    const TrainedModel nn = fit(spec_of(ModelKind::NeuralNet, fast_hp(ModelKind::NeuralNet)), data);
    CHECK(nn.metadata().contains("final_loss"));
    CHECK(fit(spec_of(ModelKind::NaiveBayes), data).metadata().at("train_size") == data.size());
}

TEST_CASE("merge_metadata adds keys without clobbering the payload") {
    const Dataset data = iqtest::separable_fixture(30, 61);
    TrainedModel model = fit(spec_of(ModelKind::NaiveBayes), data);
    model.merge_metadata({{"split_seed", 123}, {"note", "hold-out"}});
    CHECK(model.metadata().at("split_seed") == 123);
    CHECK(model.metadata().at("note") == "hold-out");
    CHECK(model.metadata().at("train_size") == data.size());
}
