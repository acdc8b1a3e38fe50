#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "tricept/dataset.hpp"
#include "tricept/mlp.hpp"
#include "tricept/numerics.hpp"
#include "tricept/rbf.hpp"

namespace tricept::eval {

// Any trained network, reduced to the one thing evaluation needs from it.
using Predictor = std::function<Matrix(const Matrix&)>;

struct EvalResult {
    double mse = 0.0;
    std::array<double, 3> per_output_mse{}; // one per leg, columns q1..q3
    double max_abs_error = 0.0;
    std::size_t n = 0; // pooled error count (samples x outputs)
};

// Errors are target - prediction, pooled over every sample and output.
EvalResult evaluate(const Predictor& predict, const data::Dataset& ds);

// Same, but errors are expressed in original units by scaling each output
// column's error with that column's normalization range.
EvalResult evaluate(const Predictor& predict, const data::Dataset& ds,
                    const data::NormalizationMap& map);

Vector collect_errors(const Predictor& predict, const data::Dataset& ds);
Vector collect_errors(const Predictor& predict, const data::Dataset& ds,
                      const data::NormalizationMap& map);

// Strictly-below count over absolute values, as a fraction of all entries.
double fraction_below(const Vector& values, double threshold);

struct Histogram {
    Vector edges;                    // bins + 1 ascending edges
    std::vector<std::size_t> counts; // one per bin
};

// Equal-width bins spanning [min, max]; a degenerate span is widened by
// half a unit to each side so a constant sample still yields a histogram.
Histogram histogram(const Vector& values, std::size_t bins);

void export_histogram(const Histogram& h, const std::string& path);
void export_training_curve(const std::vector<mlp::TrainRecord>& history, const std::string& path);
void export_training_curve(const std::vector<rbf::GrowthRecord>& history, const std::string& path);

struct CompareEntry {
    std::string label;
    EvalResult result;
    double goal_mse = 0.0;
};

struct CompareReport {
    std::vector<CompareEntry> entries;
    bool all_pass = true;
    std::string text; // rendered table with one verdict per entry
};

CompareReport compare_report(const std::vector<CompareEntry>& entries);

} // namespace tricept::eval
