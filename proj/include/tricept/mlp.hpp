#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tricept/dataset.hpp"
#include "tricept/numerics.hpp"

namespace tricept::mlp {

enum class Activation { tansig, logsig, linear };

Activation parse_activation(const std::string& name);
std::string activation_name(Activation a);

double tansig(double v);
double logsig(double v);

// Fully connected feedforward network. All layers but the last apply
// hidden_activation; the last applies output_activation (linear by default,
// which is what regression needs).
struct MlpModel {
    std::vector<std::size_t> layer_sizes;
    Activation hidden_activation = Activation::tansig;
    Activation output_activation = Activation::linear;
    std::vector<Matrix> weights; // weights[l] has shape (layer_sizes[l+1] x layer_sizes[l])
    std::vector<Vector> biases;  // biases[l] has length layer_sizes[l+1]

    std::size_t param_count() const;
};

// Weights seeded-uniform in [-0.5, 0.5], biases zero. Deterministic per seed.
MlpModel init(const std::vector<std::size_t>& layer_sizes, Activation hidden_activation,
              std::uint64_t seed);

// Like init, but first-layer weights for input j are drawn from
// [-0.5, 0.5] / input_scales[j]. Needed when raw input columns span very
// different magnitudes (an unscaled millimeter column saturates a sigmoid
// hidden layer so hard its gradient underflows and training cannot move).
MlpModel init_scaled(const std::vector<std::size_t>& layer_sizes, Activation hidden_activation,
                     std::uint64_t seed, const Vector& input_scales);

Vector forward(const MlpModel& model, const Vector& input);
Matrix forward_batch(const MlpModel& model, const Matrix& inputs);

// Mean over all n*outputs squared entries of (targets - outputs).
double mse(const Matrix& outputs, const Matrix& targets);

struct JacobianResult {
    // Row r = sample r/3, output r%3 (sample-major). Column order: layer 0
    // weights row-major, layer 0 biases, layer 1 weights, ... Entries are
    // analytic d(error)/d(param) with error = target - output.
    Matrix jac;
    Vector errors;
};

JacobianResult jacobian(const MlpModel& model, const Matrix& inputs, const Matrix& targets);

struct LmOptions {
    std::size_t max_epochs = 222;
    double goal_mse = 1e-3;
    double lambda_init = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    double lambda_max = 1e10;
    std::size_t max_validation_failures = 6;

    void validate() const;
};

struct TrainRecord {
    std::size_t epoch;
    double mse_train;
    std::optional<double> mse_validation; // absent when no validation set was given
    double lambda;                        // damping that produced this epoch's step
};

struct TrainResult {
    MlpModel model; // snapshot with the best validation MSE (final model without validation)
    std::vector<TrainRecord> history;
};

// Batch Levenberg-Marquardt. Per epoch: build J and e once, solve
// (J^T J + lambda I) step = J^T e, apply params -= step; accept and shrink
// lambda when the training MSE decreases, otherwise grow lambda and retry
// within the epoch until lambda_max. Stops on max_epochs, goal_mse,
// lambda overflow, or max_validation_failures epochs without a new best
// validation MSE. Throws TrainingStalledError when lambda overflows before
// any step was ever accepted.
TrainResult train_lm(const MlpModel& model, const data::Dataset& train_set,
                     const data::Dataset& validation_set, const LmOptions& opts);

// Flat text serialization, 17 significant digits, exact round trip. The
// optional normalization map travels with the model so a prediction tool
// can map raw poses into the model's space and back.
void save(const MlpModel& model, const std::string& path,
          const std::optional<data::NormalizationMap>& map = std::nullopt);

struct LoadedModel {
    MlpModel model;
    std::optional<data::NormalizationMap> map;
};

LoadedModel load(const std::string& path);

} // namespace tricept::mlp
