#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tricept/dataset.hpp"
#include "tricept/numerics.hpp"

namespace tricept::rbf {

// Gaussian kernel value for a squared distance.
double gaussian(double squared_distance, double beta);

// Sharpness such that the kernel reads 0.5 exactly one spread away from
// the center: beta = ln 2 / spread^2.
double spread_to_beta(double spread);

struct RbfModel {
    Matrix centers;  // one training sample per row
    double spread = 0.0;
    double beta = 0.0;
    bool has_bias = true;
    // (centers.rows() + has_bias) x n_outputs; when has_bias the bias row
    // comes first, mirroring how the network is grown.
    Matrix weights;

    std::size_t neuron_count() const { return centers.rows(); }
};

Vector forward(const RbfModel& model, const Vector& input);
Matrix forward_batch(const RbfModel& model, const Matrix& inputs);

struct RbfOptions {
    std::size_t max_neurons = 20;
    double goal_mse = 1e-3;
    double spread = 2.0;
    bool include_bias = true;

    void validate() const;
};

struct GrowthRecord {
    std::size_t neurons;
    double mse; // exact least-squares refit over the training set
};

struct RbfTrainResult {
    RbfModel model;
    std::vector<GrowthRecord> history;
};

// Incremental center selection: start from the bias-only fit (or the zero
// model without bias), then repeatedly adopt the training sample whose
// kernel column shrinks the refitted sum of squares the most, refit all
// output weights by least squares, and record the new MSE. Candidate
// scoring uses the orthogonal-projection identity (the squared projection
// of the residual onto the newly orthogonalized column is exactly the sum
// of squares the refit will remove), so each round costs one pass over the
// remaining samples instead of one full refit per candidate. Stops at
// goal_mse, at max_neurons, or when no usable candidate remains. A run
// that stops before adding any neuron records {0, mse}; otherwise record
// k holds the MSE after the k-th neuron.
RbfTrainResult train_incremental(const data::Dataset& train_set, const RbfOptions& opts);

void save(const RbfModel& model, const std::string& path,
          const std::optional<data::NormalizationMap>& map = std::nullopt);

struct LoadedModel {
    RbfModel model;
    std::optional<data::NormalizationMap> map;
};

LoadedModel load(const std::string& path);

} // namespace tricept::rbf
