#include "iqbench/classifiers/neural_net.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "iqbench/errors.hpp"
#include "iqbench/rng.hpp"

namespace iqbench {

namespace {

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

void apply_activation(Activation act, Eigen::MatrixXd& z) {
    switch (act) {
        case Activation::Relu:
            z = z.cwiseMax(0.0);
            break;
        case Activation::Sigmoid:
            z = z.unaryExpr([](double v) { return stable_sigmoid(v); });
            break;
        case Activation::Tanh:
            z = z.array().tanh().matrix();
            break;
        case Activation::Rbf:
            z = z.unaryExpr([](double v) { return std::exp(-v * v); });
            break;
    }
}

// Derivative in terms of pre-activation z and activation value a.
Eigen::MatrixXd activation_grad(Activation act, const Eigen::MatrixXd& z,
                                const Eigen::MatrixXd& a) {
    switch (act) {
        case Activation::Relu:
            return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
        case Activation::Sigmoid:
            return (a.array() * (1.0 - a.array())).matrix();
        case Activation::Tanh:
            return (1.0 - a.array().square()).matrix();
        case Activation::Rbf:
            return (-2.0 * z.array() * a.array()).matrix();
    }
    return Eigen::MatrixXd::Zero(z.rows(), z.cols());
}

struct ParamView {
    Eigen::Map<const Eigen::MatrixXd> w1;
    Eigen::Map<const Eigen::VectorXd> b1;
    Eigen::Map<const Eigen::MatrixXd> w2;
    Eigen::Map<const Eigen::VectorXd> b2;
    Eigen::Map<const Eigen::VectorXd> w3;
    double b3;
};

ParamView view(const NnShape& s, const Eigen::VectorXd& theta) {
    const int l1 = s.layer1;
    const int l2 = s.layer2;
    const double* p = theta.data();
    return ParamView{
        {p, l1, 2},                                // w1
        {p + 2 * l1, l1},                          // b1
        {p + 3 * l1, l2, l1},                      // w2
        {p + 3 * l1 + l1 * l2, l2},                // b2
        {p + 3 * l1 + l1 * l2 + l2, l2},           // w3
        p[3 * l1 + l1 * l2 + 2 * l2],              // b3
    };
}

struct ForwardPass {
    Eigen::MatrixXd z1, a1, z2, a2;
    Eigen::RowVectorXd z3, yhat;
};

ForwardPass run_forward(const NnShape& shape, const Eigen::VectorXd& theta,
                        const Eigen::MatrixXd& x) {
    const ParamView p = view(shape, theta);
    ForwardPass fp;
    fp.z1 = p.w1 * x;
    fp.z1.colwise() += p.b1;
    fp.a1 = fp.z1;
    apply_activation(shape.activation, fp.a1);
    fp.z2 = p.w2 * fp.a1;
    fp.z2.colwise() += p.b2;
    fp.a2 = fp.z2;
    apply_activation(shape.activation, fp.a2);
    fp.z3 = p.w3.transpose() * fp.a2;
    fp.z3.array() += p.b3;
    fp.yhat = fp.z3.unaryExpr([](double v) { return stable_sigmoid(v); });
    return fp;
}

double bce_from_logits(const Eigen::RowVectorXd& z3, const Eigen::VectorXd& targets01) {
    double loss = 0.0;
    for (Eigen::Index k = 0; k < z3.size(); ++k)
        loss += softplus(z3(k)) - targets01(k) * z3(k);
    return loss / static_cast<double>(z3.size());
}

void validate_shape(const NnShape& shape) {
    if (shape.layer1 < 1)
        throw InvalidHyperparamError("layer1", "must be >= 1, got " + std::to_string(shape.layer1));
    if (shape.layer2 < 1)
        throw InvalidHyperparamError("layer2", "must be >= 1, got " + std::to_string(shape.layer2));
}

}  // namespace

int nn_param_count(const NnShape& shape) {
    validate_shape(shape);
    return 3 * shape.layer1 + shape.layer1 * shape.layer2 + 2 * shape.layer2 + 1;
}

Eigen::RowVectorXd nn_forward(const NnShape& shape, const Eigen::VectorXd& theta,
                              const Eigen::MatrixXd& x) {
    return run_forward(shape, theta, x).yhat;
}

double nn_loss(const NnShape& shape, const Eigen::VectorXd& theta, const Eigen::MatrixXd& x,
               const Eigen::VectorXd& targets01) {
    return bce_from_logits(run_forward(shape, theta, x).z3, targets01);
}

double nn_loss_grad(const NnShape& shape, const Eigen::VectorXd& theta, const Eigen::MatrixXd& x,
                    const Eigen::VectorXd& targets01, Eigen::VectorXd& grad) {
    const ParamView p = view(shape, theta);
    const ForwardPass fp = run_forward(shape, theta, x);
    const double m = static_cast<double>(x.cols());

    grad.resize(theta.size());
    const int l1 = shape.layer1;
    const int l2 = shape.layer2;
    double* g = grad.data();
    Eigen::Map<Eigen::MatrixXd> gw1(g, l1, 2);
    Eigen::Map<Eigen::VectorXd> gb1(g + 2 * l1, l1);
    Eigen::Map<Eigen::MatrixXd> gw2(g + 3 * l1, l2, l1);
    Eigen::Map<Eigen::VectorXd> gb2(g + 3 * l1 + l1 * l2, l2);
    Eigen::Map<Eigen::VectorXd> gw3(g + 3 * l1 + l1 * l2 + l2, l2);
    double& gb3 = g[3 * l1 + l1 * l2 + 2 * l2];

    // Sigmoid + BCE collapse to yhat - t at the output.
    const Eigen::RowVectorXd dz3 = (fp.yhat - targets01.transpose()) / m;
    gw3 = fp.a2 * dz3.transpose();
    gb3 = dz3.sum();

    Eigen::MatrixXd dz2 = (p.w3 * dz3).cwiseProduct(activation_grad(shape.activation, fp.z2, fp.a2));
    gw2 = dz2 * fp.a1.transpose();
    gb2 = dz2.rowwise().sum();

    Eigen::MatrixXd dz1 =
        (p.w2.transpose() * dz2).cwiseProduct(activation_grad(shape.activation, fp.z1, fp.a1));
    gw1 = dz1 * x.transpose();
    gb1 = dz1.rowwise().sum();

    return bce_from_logits(fp.z3, targets01);
}

std::vector<double> NeuralNetModel::proba(const std::vector<IQPoint>& points) const {
    Eigen::MatrixXd x(2, static_cast<Eigen::Index>(points.size()));
    for (std::size_t k = 0; k < points.size(); ++k) {
        x(0, static_cast<Eigen::Index>(k)) = points[k].i;
        x(1, static_cast<Eigen::Index>(k)) = points[k].q;
    }
    const Eigen::RowVectorXd yhat = nn_forward(shape, theta, x);
    return std::vector<double>(yhat.data(), yhat.data() + yhat.size());
}

double NeuralNetModel::proba_one(IQPoint p) const { return proba(std::vector<IQPoint>{p})[0]; }

NeuralNetModel fit_nn(const Dataset& train, const NnShape& shape, Optimizer optimizer,
                      double learning_rate, int epochs, int batch_size, std::uint64_t seed) {
    validate_shape(shape);
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw InvalidHyperparamError("learning_rate", "must be a positive finite number");
    if (epochs < 1)
        throw InvalidHyperparamError("epochs", "must be >= 1, got " + std::to_string(epochs));
    if (batch_size < 1)
        throw InvalidHyperparamError("batch_size",
                                     "must be >= 1, got " + std::to_string(batch_size));
    train.require_both_classes();

    const auto& shots = train.shots();
    const std::size_t n = shots.size();

    NeuralNetModel model;
    model.shape = shape;
    model.optimizer = optimizer;
    model.learning_rate = learning_rate;
    model.epochs = epochs;
    model.batch_size = batch_size;
    model.seed = seed;

    // Glorot-uniform weights, zero biases.
    Rng rng(derive_seed(seed, "nn-init"));
    const int count = nn_param_count(shape);
    model.theta = Eigen::VectorXd::Zero(count);
    const int l1 = shape.layer1;
    const int l2 = shape.layer2;
    const auto fill_uniform = [&](int offset, int rows, int cols, int fan_in, int fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (int k = 0; k < rows * cols; ++k)
            model.theta(offset + k) = rng.uniform(-limit, limit);
    };
    fill_uniform(0, l1, 2, 2, l1);
    fill_uniform(3 * l1, l2, l1, l1, l2);
    fill_uniform(3 * l1 + l1 * l2 + l2, l2, 1, l2, 1);

    // Optimizer state.
    Eigen::VectorXd grad(count);
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(count);  // Adam first moment
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(count);  // second moment / accumulators
    std::uint64_t step = 0;
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kRho = 0.9;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(seed, "nn-batches"));

    Eigen::MatrixXd xb;
    Eigen::VectorXd tb;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t at = 0; at < n; at += static_cast<std::size_t>(batch_size)) {
            const std::size_t sz = std::min(static_cast<std::size_t>(batch_size), n - at);
            xb.resize(2, static_cast<Eigen::Index>(sz));
            tb.resize(static_cast<Eigen::Index>(sz));
            for (std::size_t k = 0; k < sz; ++k) {
                const LabeledShot& s = shots[order[at + k]];
                xb(0, static_cast<Eigen::Index>(k)) = s.point.i;
                xb(1, static_cast<Eigen::Index>(k)) = s.point.q;
                tb(static_cast<Eigen::Index>(k)) = static_cast<double>(to_int(s.label));
            }

            const double loss = nn_loss_grad(shape, model.theta, xb, tb, grad);
            if (!std::isfinite(loss))
                throw DivergenceDetectedError("training loss became non-finite at epoch " +
                                              std::to_string(epoch));
            epoch_sum += loss;
            ++batches;
            ++step;

            switch (optimizer) {
                case Optimizer::Sgd:
                    model.theta -= learning_rate * grad;
                    break;
                case Optimizer::Adam: {
                    m1 = kBeta1 * m1 + (1.0 - kBeta1) * grad;
                    m2 = kBeta2 * m2 + (1.0 - kBeta2) * grad.cwiseProduct(grad);
                    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
                    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
                    model.theta.array() -= learning_rate * (m1.array() / c1) /
                                           ((m2.array() / c2).sqrt() + 1e-8);
                    break;
                }
                case Optimizer::Adagrad:
                    m2 += grad.cwiseProduct(grad);
                    model.theta.array() -= learning_rate * grad.array() /
                                           (m2.array().sqrt() + 1e-10);
                    break;
                case Optimizer::RmsProp:
                    m2 = kRho * m2 + (1.0 - kRho) * grad.cwiseProduct(grad);
                    model.theta.array() -=
                        learning_rate * grad.array() / (m2.array().sqrt() + 1e-8);
                    break;
            }
        }
        model.epoch_loss.push_back(epoch_sum / static_cast<double>(batches));
    }
    return model;
}

}  // namespace iqbench
