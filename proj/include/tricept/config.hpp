#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tricept/dataset.hpp"
#include "tricept/kinematics.hpp"
#include "tricept/mlp.hpp"
#include "tricept/rbf.hpp"

namespace tricept::config {

// Everything one pipeline run needs, with defaults that train both
// surrogates on the stock manipulator and working envelope. Training
// goal_mse defaults to 0 so runs exhaust their epoch / neuron budget; the
// report goals below are the pass/fail thresholds applied afterwards.
struct RunConfig {
    TriceptGeometry geometry{500.0, 760.0, 30.0};
    PoseDomain domain{-0.5027, 0.5027, -0.5027, 0.5027, 426.0, 634.0};

    data::SamplingScheme scheme = data::SamplingScheme::grid;
    std::size_t n_samples = 4818;
    std::uint64_t sampling_seed = 1;

    double train_ratio = 0.70;
    double validation_ratio = 0.15;
    double test_ratio = 0.15;
    std::uint64_t split_seed = 2;

    std::vector<std::size_t> mlp_hidden = {5};
    mlp::Activation mlp_hidden_activation = mlp::Activation::tansig;
    mlp::Activation mlp_output_activation = mlp::Activation::linear;
    mlp::LmOptions mlp_options = []() {
        mlp::LmOptions o;
        o.goal_mse = 0.0;
        return o;
    }();
    // Seed 5 converges in both normalized and raw units; several nearby
    // seeds stall on a Levenberg-Marquardt saddle when the targets are in
    // millimeters, so the default favors the robust one.
    std::uint64_t mlp_seed = 5;

    std::size_t rbf_max_neurons = 20;
    double rbf_goal_mse = 0.0;
    double rbf_spread_normalized = 2.0;
    double rbf_spread_real = 200.0;
    bool rbf_include_bias = true;

    double report_goal_normalized = 1e-3;
    double report_goal_real = 1e-3;
    std::size_t histogram_bins = 20;

    // Throws InvalidArgumentError on an unusable combination.
    void validate() const;

    // Replaces every stage seed deterministically from one master seed.
    void override_seeds(std::uint64_t seed);
};

// Parses an INI-style file ([section] headers, key = value lines, '#' or
// ';' comments). Unknown sections or keys and malformed values raise
// ParseError with the line number. Missing keys keep their defaults.
RunConfig load_config(const std::string& path);

} // namespace tricept::config
