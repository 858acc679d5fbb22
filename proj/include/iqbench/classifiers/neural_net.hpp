#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "iqbench/iqcore.hpp"

namespace iqbench {

enum class Activation { Relu, Sigmoid, Tanh, Rbf };  // rbf(z) = exp(-z^2)
enum class Optimizer { Adam, Adagrad, Sgd, RmsProp };

struct NnShape {
    int layer1 = 16;
    int layer2 = 16;
    Activation activation = Activation::Relu;
};

// Parameters live in one flat vector (column-major blocks, in order:
// W1 [layer1 x 2], b1, W2 [layer2 x layer1], b2, w3 [layer2], b3) so the
// optimizers and the finite-difference oracle treat the network as a plain
// R^n function.
int nn_param_count(const NnShape& shape);

// Forward pass: inputs are columns of x (2 x m); returns P(Excited) per column.
Eigen::RowVectorXd nn_forward(const NnShape& shape, const Eigen::VectorXd& theta,
                              const Eigen::MatrixXd& x);

// Mean binary cross-entropy of the batch.
double nn_loss(const NnShape& shape, const Eigen::VectorXd& theta, const Eigen::MatrixXd& x,
               const Eigen::VectorXd& targets01);

// Loss plus its analytic gradient (backprop); exposed for the gradient check.
double nn_loss_grad(const NnShape& shape, const Eigen::VectorXd& theta, const Eigen::MatrixXd& x,
                    const Eigen::VectorXd& targets01, Eigen::VectorXd& grad);

struct NeuralNetModel {
    NnShape shape;
    Optimizer optimizer = Optimizer::Adam;
    double learning_rate = 1e-3;
    int epochs = 10;
    int batch_size = 32;
    std::uint64_t seed = 0;
    Eigen::VectorXd theta;
    std::vector<double> epoch_loss;  // mean training loss per epoch

    std::vector<double> proba(const std::vector<IQPoint>& points) const;
    double proba_one(IQPoint p) const;
    StateLabel classify(IQPoint p) const {
        return proba_one(p) > 0.5 ? StateLabel::Excited : StateLabel::Ground;
    }
};

// Glorot-uniform init from the seed, shuffled mini-batches, and the selected
// optimizer (Adam beta 0.9/0.999 eps 1e-8, RMSprop rho 0.9 eps 1e-8, Adagrad
// eps 1e-10). Throws DivergenceDetectedError when the loss turns non-finite.
NeuralNetModel fit_nn(const Dataset& train, const NnShape& shape, Optimizer optimizer,
                      double learning_rate, int epochs, int batch_size, std::uint64_t seed);

}  // namespace iqbench
