#include "iqbench/classifiers/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "iqbench/errors.hpp"

namespace iqbench {

namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct KindInfo {
    ModelKind kind;
    const char* id;
    const char* display;
};

constexpr KindInfo kKinds[] = {
    {ModelKind::FidelityFit, "fidelity_fit", "Fidelity Fit"},
    {ModelKind::LinearSvm, "linear_svm", "Linear SVM"},
    {ModelKind::RbfSvm, "rbf_svm", "RBF SVM"},
    {ModelKind::NaiveBayes, "naive_bayes", "Naive Bayes"},
    {ModelKind::AdaBoost, "ada_boost", "Ada Boost"},
    {ModelKind::RandomForest, "random_forest", "Random Forest"},
    {ModelKind::GaussianProcess, "gaussian_process", "Gaussian Process"},
    {ModelKind::NeuralNet, "neural_net", "Neural Network"},
};

const KindInfo& info_for(ModelKind kind) {
    for (const auto& k : kKinds)
        if (k.kind == kind) return k;
    throw ConfigError("unknown model kind enum value");
}

// --- hyperparameter schema -------------------------------------------------

class HyperparamReader {
public:
    HyperparamReader(ModelKind kind, const json& raw) : kind_(kind), raw_(raw) {
        if (!raw.is_object() && !raw.is_null())
            throw InvalidHyperparamError("<root>", "hyperparams must be a JSON object");
    }

    double real(const char* name, double fallback, double lo, double hi, bool lo_open = false) {
        const json* v = take(name);
        if (!v) return fallback;
        if (!v->is_number())
            throw InvalidHyperparamError(name, "expected a number");
        const double x = v->get<double>();
        const bool above = lo_open ? x > lo : x >= lo;
        if (!std::isfinite(x) || !above || x > hi)
            throw InvalidHyperparamError(name, "out of range [" + std::to_string(lo) + ", " +
                                                   std::to_string(hi) + "]");
        return x;
    }

    int integer(const char* name, int fallback, int lo, int hi) {
        const json* v = take(name);
        if (!v) return fallback;
        if (!v->is_number_integer())
            throw InvalidHyperparamError(name, "expected an integer");
        const long long x = v->get<long long>();
        if (x < lo || x > hi)
            throw InvalidHyperparamError(name, "out of range [" + std::to_string(lo) + ", " +
                                                   std::to_string(hi) + "]");
        return static_cast<int>(x);
    }

    std::string choice(const char* name, const char* fallback,
                       std::initializer_list<const char*> allowed) {
        const json* v = take(name);
        if (!v) return fallback;
        if (!v->is_string())
            throw InvalidHyperparamError(name, "expected a string");
        const std::string s = v->get<std::string>();
        for (const char* a : allowed)
            if (s == a) return s;
        std::string msg = "expected one of:";
        for (const char* a : allowed) msg += std::string(" ") + a;
        throw InvalidHyperparamError(name, msg);
    }

    bool boolean(const char* name, bool fallback) {
        const json* v = take(name);
        if (!v) return fallback;
        if (!v->is_boolean())
            throw InvalidHyperparamError(name, "expected a boolean");
        return v->get<bool>();
    }

    // gamma accepts the literal "scale" or a positive real.
    json gamma(const char* name) {
        const json* v = take(name);
        if (!v) return json("scale");
        if (v->is_string()) {
            if (v->get<std::string>() != "scale")
                throw InvalidHyperparamError(name, "string value must be \"scale\"");
            return *v;
        }
        if (!v->is_number() || !(v->get<double>() > 0.0) || !std::isfinite(v->get<double>()))
            throw InvalidHyperparamError(name, "expected \"scale\" or a positive number");
        return *v;
    }

    void finish() const {
        if (!raw_.is_object()) return;
        for (auto it = raw_.begin(); it != raw_.end(); ++it)
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
                throw InvalidHyperparamError(it.key(), "unknown key for model '" +
                                                           kind_id(kind_) + "'");
    }

private:
    const json* take(const char* name) {
        seen_.push_back(name);
        if (!raw_.is_object()) return nullptr;
        const auto it = raw_.find(name);
        return it == raw_.end() ? nullptr : &*it;
    }

    ModelKind kind_;
    const json& raw_;
    std::vector<std::string> seen_;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// --- payload (de)serialization ----------------------------------------------

json points_to_json(const std::vector<IQPoint>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(json::array({p.i, p.q}));
    return arr;
}

std::vector<IQPoint> points_from_json(const json& arr) {
    std::vector<IQPoint> pts;
    pts.reserve(arr.size());
    for (const auto& e : arr) pts.push_back(IQPoint{e.at(0).get<double>(), e.at(1).get<double>()});
    return pts;
}

json payload_to_json(const FidelityFitParams& m) {
    return json{{"axis_i", m.axis_i},
                {"axis_q", m.axis_q},
                {"threshold", m.threshold},
                {"orientation", m.orientation},
                {"max_cdf_diff", m.max_cdf_diff}};
}

json payload_to_json(const LinearSvmModel& m) {
    return json{{"w", json::array({m.w[0], m.w[1]})},
                {"b", m.b},
                {"C", m.C},
                {"platt_slope", m.platt.slope}};
}

json payload_to_json(const RbfSvmModel& m) {
    return json{{"support", points_to_json(m.support)}, {"coef", m.coef},
                {"b", m.b},                             {"gamma", m.gamma},
                {"C", m.C},                             {"degree", m.degree},
                {"platt_slope", m.platt.slope}};
}

json payload_to_json(const GaussianNbModel& m) {
    return json{{"prior", m.prior},
                {"mean", json::array({m.mean[0], m.mean[1]})},
                {"var", json::array({m.var[0], m.var[1]})}};
}

const char* variant_id(AdaBoostVariant v) {
    return v == AdaBoostVariant::Samme ? "SAMME" : "SAMME.R";
}

json payload_to_json(const AdaBoostModel& m) {
    json rounds = json::array();
    for (const auto& r : m.rounds)
        rounds.push_back(json{{"feature", r.stump.feature},
                              {"threshold", r.stump.threshold},
                              {"left_value", r.stump.left_value},
                              {"right_value", r.stump.right_value},
                              {"alpha", r.alpha},
                              {"eps", r.eps},
                              {"z", r.z}});
    return json{{"variant", variant_id(m.variant)},
                {"learning_rate", m.learning_rate},
                {"training_error", m.training_error},
                {"rounds", std::move(rounds)}};
}

const char* criterion_id(SplitCriterion c) {
    return c == SplitCriterion::Gini ? "gini" : "entropy";
}

const char* max_features_id(MaxFeatures m) {
    switch (m) {
        case MaxFeatures::Sqrt: return "sqrt";
        case MaxFeatures::Log2: return "log2";
        case MaxFeatures::All: return "all";
    }
    return "sqrt";
}

json payload_to_json(const RandomForestModel& m) {
    json trees = json::array();
    for (const auto& tree : m.trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes)
            nodes.push_back(
                json::array({n.feature, n.threshold, n.left, n.right, to_int(n.label)}));
        trees.push_back(std::move(nodes));
    }
    return json{{"criterion", criterion_id(m.criterion)},
                {"max_features", max_features_id(m.max_features)},
                {"seed", m.seed},
                {"bootstrap", m.bootstrap},
                {"trees", std::move(trees)}};
}

json payload_to_json(const GpModel& m) {
    return json{{"gamma", m.gamma},
                {"signal_var", m.signal_var},
                {"jitter", m.jitter},
                {"newton_iterations", m.newton_iterations},
                {"grad_norm", m.grad_norm},
                {"inputs", points_to_json(m.inputs)},
                {"targets", m.targets01},
                {"dual", std::vector<double>(m.dual.data(), m.dual.data() + m.dual.size())}};
}

const char* activation_id(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
        case Activation::Rbf: return "rbf";
    }
    return "relu";
}

const char* optimizer_id(Optimizer o) {
    switch (o) {
        case Optimizer::Adam: return "Adam";
        case Optimizer::Adagrad: return "Adagrad";
        case Optimizer::Sgd: return "SGD";
        case Optimizer::RmsProp: return "RMSprop";
    }
    return "Adam";
}

Activation activation_from_id(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "tanh") return Activation::Tanh;
    if (s == "rbf") return Activation::Rbf;
    throw ConfigError("unknown activation '" + s + "'");
}

Optimizer optimizer_from_id(const std::string& s) {
    if (s == "Adam") return Optimizer::Adam;
    if (s == "Adagrad") return Optimizer::Adagrad;
    if (s == "SGD") return Optimizer::Sgd;
    if (s == "RMSprop") return Optimizer::RmsProp;
    throw ConfigError("unknown optimizer '" + s + "'");
}

json payload_to_json(const NeuralNetModel& m) {
    return json{{"layer1", m.shape.layer1},
                {"layer2", m.shape.layer2},
                {"activation", activation_id(m.shape.activation)},
                {"optimizer", optimizer_id(m.optimizer)},
                {"learning_rate", m.learning_rate},
                {"epochs", m.epochs},
                {"batch_size", m.batch_size},
                {"seed", m.seed},
                {"theta", std::vector<double>(m.theta.data(), m.theta.data() + m.theta.size())},
                {"epoch_loss", m.epoch_loss}};
}

TrainedModel::Payload payload_from_json(ModelKind kind, const json& p) {
    switch (kind) {
        case ModelKind::FidelityFit: {
            FidelityFitParams m;
            m.axis_i = p.at("axis_i").get<double>();
            m.axis_q = p.at("axis_q").get<double>();
            m.threshold = p.at("threshold").get<double>();
            m.orientation = p.at("orientation").get<int>();
            m.max_cdf_diff = p.at("max_cdf_diff").get<double>();
            return m;
        }
        case ModelKind::LinearSvm: {
            LinearSvmModel m;
            m.w[0] = p.at("w").at(0).get<double>();
            m.w[1] = p.at("w").at(1).get<double>();
            m.b = p.at("b").get<double>();
            m.C = p.at("C").get<double>();
            m.platt.slope = p.at("platt_slope").get<double>();
            return m;
        }
        case ModelKind::RbfSvm: {
            RbfSvmModel m;
            m.support = points_from_json(p.at("support"));
            m.coef = p.at("coef").get<std::vector<double>>();
            m.b = p.at("b").get<double>();
            m.gamma = p.at("gamma").get<double>();
            m.C = p.at("C").get<double>();
            m.degree = p.at("degree").get<int>();
            m.platt.slope = p.at("platt_slope").get<double>();
            return m;
        }
        case ModelKind::NaiveBayes: {
            GaussianNbModel m;
            m.prior = p.at("prior").get<std::array<double, 2>>();
            m.mean[0] = p.at("mean").at(0).get<std::array<double, 2>>();
            m.mean[1] = p.at("mean").at(1).get<std::array<double, 2>>();
            m.var[0] = p.at("var").at(0).get<std::array<double, 2>>();
            m.var[1] = p.at("var").at(1).get<std::array<double, 2>>();
            return m;
        }
        case ModelKind::AdaBoost: {
            AdaBoostModel m;
            const std::string v = p.at("variant").get<std::string>();
            m.variant = v == "SAMME" ? AdaBoostVariant::Samme : AdaBoostVariant::SammeR;
            m.learning_rate = p.at("learning_rate").get<double>();
            m.training_error = p.at("training_error").get<double>();
            for (const auto& r : p.at("rounds")) {
                BoostRound round;
                round.stump.feature = r.at("feature").get<int>();
                // a degenerate constant stump stores threshold +inf, which
                // JSON round-trips as null
                round.stump.threshold = r.at("threshold").is_null()
                                            ? std::numeric_limits<double>::infinity()
                                            : r.at("threshold").get<double>();
                round.stump.left_value = r.at("left_value").get<double>();
                round.stump.right_value = r.at("right_value").get<double>();
                round.alpha = r.at("alpha").get<double>();
                round.eps = r.at("eps").get<double>();
                round.z = r.at("z").get<double>();
                m.rounds.push_back(round);
            }
            return m;
        }
        case ModelKind::RandomForest: {
            RandomForestModel m;
            const std::string c = p.at("criterion").get<std::string>();
            m.criterion = c == "gini" ? SplitCriterion::Gini : SplitCriterion::Entropy;
            const std::string f = p.at("max_features").get<std::string>();
            m.max_features = f == "sqrt"   ? MaxFeatures::Sqrt
                             : f == "log2" ? MaxFeatures::Log2
                                           : MaxFeatures::All;
            m.seed = p.at("seed").get<std::uint64_t>();
            m.bootstrap = p.at("bootstrap").get<bool>();
            for (const auto& tree_json : p.at("trees")) {
                DecisionTree tree;
                for (const auto& n : tree_json) {
                    TreeNode node;
                    node.feature = n.at(0).get<int>();
                    node.threshold = n.at(1).get<double>();
                    node.left = n.at(2).get<int>();
                    node.right = n.at(3).get<int>();
                    node.label = label_from_int(n.at(4).get<int>());
                    tree.nodes.push_back(node);
                }
                m.trees.push_back(std::move(tree));
            }
            return m;
        }
        case ModelKind::GaussianProcess: {
            GpModel m;
            m.gamma = p.at("gamma").get<double>();
            m.signal_var = p.at("signal_var").get<double>();
            m.jitter = p.at("jitter").get<double>();
            m.newton_iterations = p.at("newton_iterations").get<int>();
            m.inputs = points_from_json(p.at("inputs"));
            m.targets01 = p.at("targets").get<std::vector<int>>();
            const auto dual = p.at("dual").get<std::vector<double>>();
            m.dual = Eigen::Map<const Eigen::VectorXd>(dual.data(),
                                                       static_cast<Eigen::Index>(dual.size()));
            refresh_gp_caches(m);  // also recomputes grad_norm
            return m;
        }
        case ModelKind::NeuralNet: {
            NeuralNetModel m;
            m.shape.layer1 = p.at("layer1").get<int>();
            m.shape.layer2 = p.at("layer2").get<int>();
            m.shape.activation = activation_from_id(p.at("activation").get<std::string>());
            m.optimizer = optimizer_from_id(p.at("optimizer").get<std::string>());
            m.learning_rate = p.at("learning_rate").get<double>();
            m.epochs = p.at("epochs").get<int>();
            m.batch_size = p.at("batch_size").get<int>();
            m.seed = p.at("seed").get<std::uint64_t>();
            const auto theta = p.at("theta").get<std::vector<double>>();
            m.theta = Eigen::Map<const Eigen::VectorXd>(theta.data(),
                                                        static_cast<Eigen::Index>(theta.size()));
            m.epoch_loss = p.at("epoch_loss").get<std::vector<double>>();
            return m;
        }
    }
    throw ConfigError("unknown model kind in payload");
}

// --- fitting ------------------------------------------------------------

Standardizer fit_standardizer(const Dataset& train) {
    Standardizer s;
    s.enabled = true;
    const auto& shots = train.shots();
    const double n = static_cast<double>(shots.size());
    for (const auto& shot : shots) {
        s.mean[0] += shot.point.i;
        s.mean[1] += shot.point.q;
    }
    s.mean[0] /= n;
    s.mean[1] /= n;
    double var[2] = {0.0, 0.0};
    for (const auto& shot : shots) {
        const double di = shot.point.i - s.mean[0];
        const double dq = shot.point.q - s.mean[1];
        var[0] += di * di;
        var[1] += dq * dq;
    }
    s.scale[0] = std::max(std::sqrt(var[0] / n), 1e-30);
    s.scale[1] = std::max(std::sqrt(var[1] / n), 1e-30);
    return s;
}

Dataset transform(const Dataset& data, const Standardizer& s) {
    std::vector<LabeledShot> shots = data.shots();
    for (auto& shot : shots) shot.point = s.apply(shot.point);
    return Dataset(std::move(shots), data.seed());
}

double resolve_gamma(const json& value, const Dataset& train) {
    if (value.is_string()) return default_rbf_gamma(train);
    return value.get<double>();
}

}  // namespace

std::string kind_id(ModelKind kind) { return info_for(kind).id; }

std::string kind_display_name(ModelKind kind) { return info_for(kind).display; }

ModelKind kind_from_id(const std::string& id) {
    for (const auto& k : kKinds)
        if (id == k.id) return k.kind;
    throw ConfigError("unknown model kind '" + id + "'");
}

nlohmann::json validate_hyperparams(ModelKind kind, const nlohmann::json& hyperparams,
                                    const SpecBounds& bounds) {
    HyperparamReader reader(kind, hyperparams);
    json out = json::object();
    out["standardize"] = reader.boolean("standardize", false);
    switch (kind) {
        case ModelKind::FidelityFit:
            break;
        case ModelKind::LinearSvm:
            out["C"] = reader.real("C", 1.0, 0.0, kInf, /*lo_open=*/true);
            break;
        case ModelKind::RbfSvm:
            out["C"] = reader.real("C", 1.0, 0.0, kInf, true);
            out["gamma"] = reader.gamma("gamma");
            out["degree"] = reader.integer("degree", 3, 2, 4);
            break;
        case ModelKind::NaiveBayes:
            out["var_floor_rel"] = reader.real("var_floor_rel", 1e-9, 0.0, 1.0);
            break;
        case ModelKind::AdaBoost:
            out["n_estimators"] = reader.integer("n_estimators", 50, bounds.n_estimators_min,
                                                 bounds.n_estimators_max);
            out["learning_rate"] = reader.real("learning_rate", 1.0, 0.0, 1.0, true);
            out["algorithm"] = reader.choice("algorithm", "SAMME.R", {"SAMME", "SAMME.R"});
            break;
        case ModelKind::RandomForest:
            out["n_estimators"] = reader.integer("n_estimators", 100, bounds.n_estimators_min,
                                                 bounds.n_estimators_max);
            out["criterion"] = reader.choice("criterion", "gini", {"gini", "entropy", "log_loss"});
            out["max_features"] = reader.choice("max_features", "sqrt", {"sqrt", "log2", "all"});
            break;
        case ModelKind::GaussianProcess:
            out["gamma"] = reader.gamma("gamma");
            out["signal_variance"] = reader.real("signal_variance", 1.0, 0.0, kInf, true);
            out["jitter"] = reader.real("jitter", 1e-10, 0.0, 1e-6, true);
            break;
        case ModelKind::NeuralNet:
            out["layer1"] = reader.integer("layer1", bounds.layer_min, bounds.layer_min,
                                           bounds.layer_max);
            out["layer2"] = reader.integer("layer2", bounds.layer_min, bounds.layer_min,
                                           bounds.layer_max);
            out["activation"] =
                reader.choice("activation", "relu", {"relu", "sigmoid", "tanh", "rbf"});
            out["learning_rate"] = reader.real("learning_rate", 1e-3, 1e-4, 1e-2);
            out["optimizer"] =
                reader.choice("optimizer", "Adam", {"Adam", "Adagrad", "SGD", "RMSprop"});
            out["epochs"] = reader.integer("epochs", 30, 1, 1000000);
            out["batch_size"] = reader.integer("batch_size", 32, 1, 1000000);
            break;
    }
    reader.finish();
    return out;
}

TrainedModel::TrainedModel(ClassifierSpec spec, Standardizer scaler, Payload payload,
                           nlohmann::json metadata)
    : spec_(std::move(spec)),
      scaler_(scaler),
      payload_(std::move(payload)),
      metadata_(std::move(metadata)) {}

void TrainedModel::merge_metadata(const nlohmann::json& extra) {
    metadata_.update(extra);
}

namespace {

void require_finite(const std::vector<IQPoint>& points) {
    for (const auto& p : points)
        if (!p.finite()) throw NonFiniteInputError("prediction input contains NaN or infinity");
}

}  // namespace

std::vector<double> TrainedModel::predict_proba(const std::vector<IQPoint>& points) const {
    require_finite(points);
    std::vector<IQPoint> scratch;
    const std::vector<IQPoint>* input = &points;
    if (scaler_.enabled) {
        scratch.reserve(points.size());
        for (const auto& p : points) scratch.push_back(scaler_.apply(p));
        input = &scratch;
    }
    const auto& pts = *input;

    return std::visit(
        Overloaded{
            [&](const FidelityFitParams&) -> std::vector<double> {
                throw ProbaUnsupportedError("Fidelity Fit has no probability output");
            },
            [&](const LinearSvmModel& m) {
                std::vector<double> out(pts.size());
                for (std::size_t k = 0; k < pts.size(); ++k) out[k] = m.proba(pts[k]);
                return out;
            },
            [&](const RbfSvmModel& m) {
                std::vector<double> out(pts.size());
                for (std::size_t k = 0; k < pts.size(); ++k) out[k] = m.proba(pts[k]);
                return out;
            },
            [&](const GaussianNbModel& m) {
                std::vector<double> out(pts.size());
                for (std::size_t k = 0; k < pts.size(); ++k)
                    out[k] = m.posterior_excited(pts[k]);
                return out;
            },
            [&](const AdaBoostModel& m) {
                std::vector<double> out(pts.size());
                for (std::size_t k = 0; k < pts.size(); ++k) out[k] = m.proba(pts[k]);
                return out;
            },
            [&](const RandomForestModel& m) {
                std::vector<double> out(pts.size());
                for (std::size_t k = 0; k < pts.size(); ++k) out[k] = m.proba(pts[k]);
                return out;
            },
            [&](const GpModel& m) { return m.proba(pts); },
            [&](const NeuralNetModel& m) { return m.proba(pts); },
        },
        payload_);
}

std::vector<StateLabel> TrainedModel::predict(const std::vector<IQPoint>& points) const {
    if (const auto* ff = std::get_if<FidelityFitParams>(&payload_)) {
        require_finite(points);
        std::vector<StateLabel> out(points.size());
        for (std::size_t k = 0; k < points.size(); ++k)
            out[k] = ff->classify(scaler_.apply(points[k]));
        return out;
    }
    const std::vector<double> proba = predict_proba(points);
    std::vector<StateLabel> out(points.size());
    for (std::size_t k = 0; k < points.size(); ++k)
        out[k] = proba[k] > 0.5 ? StateLabel::Excited : StateLabel::Ground;
    return out;
}

std::vector<double> TrainedModel::roc_scores(const std::vector<IQPoint>& points) const {
    if (const auto* ff = std::get_if<FidelityFitParams>(&payload_)) {
        require_finite(points);
        std::vector<double> out(points.size());
        for (std::size_t k = 0; k < points.size(); ++k)
            out[k] = ff->margin(scaler_.apply(points[k]));
        return out;
    }
    return predict_proba(points);
}

nlohmann::json TrainedModel::to_json() const {
    json payload = std::visit([](const auto& m) { return payload_to_json(m); }, payload_);
    return json{{"format_version", 1},
                {"kind", kind_id(spec_.kind)},
                {"seed", spec_.seed},
                {"hyperparams", spec_.hyperparams},
                {"standardizer",
                 json{{"enabled", scaler_.enabled},
                      {"mean", json::array({scaler_.mean[0], scaler_.mean[1]})},
                      {"scale", json::array({scaler_.scale[0], scaler_.scale[1]})}}},
                {"metadata", metadata_},
                {"payload", std::move(payload)}};
}

TrainedModel TrainedModel::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("format_version"))
        throw ConfigError("model document is not an object with a format_version");
    if (doc.at("format_version").get<int>() != 1)
        throw ConfigError("unsupported model format_version " +
                          doc.at("format_version").dump());
    ClassifierSpec spec;
    spec.kind = kind_from_id(doc.at("kind").get<std::string>());
    spec.hyperparams = doc.at("hyperparams");
    spec.seed = doc.at("seed").get<std::uint64_t>();

    Standardizer scaler;
    const json& s = doc.at("standardizer");
    scaler.enabled = s.at("enabled").get<bool>();
    scaler.mean[0] = s.at("mean").at(0).get<double>();
    scaler.mean[1] = s.at("mean").at(1).get<double>();
    scaler.scale[0] = s.at("scale").at(0).get<double>();
    scaler.scale[1] = s.at("scale").at(1).get<double>();

    Payload payload = payload_from_json(spec.kind, doc.at("payload"));
    return TrainedModel(std::move(spec), scaler, std::move(payload), doc.at("metadata"));
}

TrainedModel fit(const ClassifierSpec& spec, const Dataset& train) {
    const json hp = validate_hyperparams(spec.kind, spec.hyperparams);
    train.require_both_classes();

    Standardizer scaler;
    Dataset transformed;
    const bool standardize = hp.at("standardize").get<bool>();
    if (standardize) {
        scaler = fit_standardizer(train);
        transformed = transform(train, scaler);
    }
    const Dataset& data = standardize ? transformed : train;

    ClassifierSpec normalized{spec.kind, hp, spec.seed};
    json meta{{"standardize", standardize}, {"train_size", data.size()}};

    switch (spec.kind) {
        case ModelKind::FidelityFit: {
            FidelityFitParams m = fit_fidelity(data);
            meta["max_cdf_diff"] = m.max_cdf_diff;
            return TrainedModel(std::move(normalized), scaler, m, std::move(meta));
        }
        case ModelKind::LinearSvm: {
            SmoReport report;
            LinearSvmModel m = fit_linear_svm(data, hp.at("C").get<double>(), &report);
            meta["smo_iterations"] = report.iterations;
            meta["dual_gap"] = report.dual_gap;
            meta["max_kkt_violation"] = report.max_kkt_violation;
            return TrainedModel(std::move(normalized), scaler, std::move(m), std::move(meta));
        }
        case ModelKind::RbfSvm: {
            const double gamma = resolve_gamma(hp.at("gamma"), data);
            SmoReport report;
            RbfSvmModel m = fit_rbf_svm(data, hp.at("C").get<double>(), gamma,
                                        hp.at("degree").get<int>(), &report);
            meta["gamma_resolved"] = gamma;
            meta["smo_iterations"] = report.iterations;
            meta["dual_gap"] = report.dual_gap;
            meta["max_kkt_violation"] = report.max_kkt_violation;
            meta["support_vectors"] = m.support.size();
            return TrainedModel(std::move(normalized), scaler, std::move(m), std::move(meta));
        }
        case ModelKind::NaiveBayes: {
            GaussianNbModel m = fit_naive_bayes(data, hp.at("var_floor_rel").get<double>());
            return TrainedModel(std::move(normalized), scaler, m, std::move(meta));
        }
        case ModelKind::AdaBoost: {
            const std::string algo = hp.at("algorithm").get<std::string>();
            AdaBoostModel m = fit_adaboost(
                data, hp.at("n_estimators").get<int>(), hp.at("learning_rate").get<double>(),
                algo == "SAMME" ? AdaBoostVariant::Samme : AdaBoostVariant::SammeR);
            meta["rounds_used"] = m.rounds.size();
            meta["training_error"] = m.training_error;
            meta["fs_bound"] = m.fs_bound();
            meta["z_bound"] = m.z_bound();
            return TrainedModel(std::move(normalized), scaler, std::move(m), std::move(meta));
        }
        case ModelKind::RandomForest: {
            const std::string c = hp.at("criterion").get<std::string>();
            const std::string f = hp.at("max_features").get<std::string>();
            RandomForestModel m = fit_random_forest(
                data, hp.at("n_estimators").get<int>(),
                c == "gini" ? SplitCriterion::Gini : SplitCriterion::Entropy,
                f == "sqrt"   ? MaxFeatures::Sqrt
                : f == "log2" ? MaxFeatures::Log2
                              : MaxFeatures::All,
                spec.seed);
            if (c == "log_loss") meta["criterion_alias"] = "log_loss -> entropy";
            return TrainedModel(std::move(normalized), scaler, std::move(m), std::move(meta));
        }
        case ModelKind::GaussianProcess: {
            const double gamma = resolve_gamma(hp.at("gamma"), data);
            GpModel m = fit_gp(data, gamma, hp.at("signal_variance").get<double>(),
                               hp.at("jitter").get<double>());
            meta["gamma_resolved"] = gamma;
            meta["quadrature"] = GpModel::kQuadrature;
            meta["newton_iterations"] = m.newton_iterations;
            meta["grad_norm"] = m.grad_norm;
            meta["jitter_used"] = m.jitter;
            return TrainedModel(std::move(normalized), scaler, std::move(m), std::move(meta));
        }
        case ModelKind::NeuralNet: {
            NnShape shape{hp.at("layer1").get<int>(), hp.at("layer2").get<int>(),
                          activation_from_id(hp.at("activation").get<std::string>())};
            NeuralNetModel m = fit_nn(data, shape,
                                      optimizer_from_id(hp.at("optimizer").get<std::string>()),
                                      hp.at("learning_rate").get<double>(),
                                      hp.at("epochs").get<int>(), hp.at("batch_size").get<int>(),
                                      spec.seed);
            meta["final_loss"] = m.epoch_loss.empty() ? 0.0 : m.epoch_loss.back();
            return TrainedModel(std::move(normalized), scaler, std::move(m), std::move(meta));
        }
    }
    throw ConfigError("unknown model kind in fit");
}

}  // namespace iqbench
