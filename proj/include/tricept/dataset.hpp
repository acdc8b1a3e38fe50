#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tricept/kinematics.hpp"
#include "tricept/numerics.hpp"

namespace tricept::data {

// Paired pose inputs (theta, psi, c) and leg-length targets (q1, q2, q3),
// one row per sample. Column order everywhere: theta, psi, c, q1, q2, q3.
struct Dataset {
    Matrix inputs;  // n x 3
    Matrix targets; // n x 3

    std::size_t n() const { return inputs.rows(); }
};

// Per-column min/max state of the [0,1] scaling, inputs first then targets.
struct NormalizationMap {
    std::array<double, 6> min;
    std::array<double, 6> max;
};

struct ColumnStats {
    double min;
    double max;
    double mean;
    double median;
    double variance; // population variance (divide by n)
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

enum class SamplingScheme { grid, random };

SamplingScheme parse_scheme(const std::string& name);
std::string scheme_name(SamplingScheme s);

// Samples n poses from the domain and evaluates the analytic inverse
// kinematics for each row. Deterministic for a given seed.
//
// grid: a near-uniform lattice with ceil(n^(1/3)) points per axis
// (endpoints included; a single-point axis sits at the interval midpoint),
// swept with theta outermost, then psi, then c, truncated to the first n
// points.
// random: seeded uniform draws over the box, theta then psi then c per row.
Dataset generate(const TriceptGeometry& geom, const PoseDomain& domain,
                 SamplingScheme scheme, std::size_t n, std::uint64_t seed);

// Exact min/max, arithmetic mean, median (midpoint of the two central order
// statistics for even n), population variance. Column order as in Dataset.
std::array<ColumnStats, 6> stats(const Dataset& ds);

// Min-max scales every column to [0, 1]. Constant columns are rejected.
std::pair<Dataset, NormalizationMap> normalize(const Dataset& ds);

// Inverse of normalize: x = x' * (max - min) + min.
Dataset denormalize(const Dataset& ds, const NormalizationMap& map);

// Seeded Fisher-Yates shuffle, then contiguous partition: train gets
// floor(n * r_train) rows, validation floor(n * r_val), test the remainder.
// Ratios must be non-negative and sum to 1; a partition with positive ratio
// may not come out empty.
SplitIndices split(const Dataset& ds, double train_ratio, double validation_ratio,
                   double test_ratio, std::uint64_t seed);

// Row subset in the order given by indices.
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

// CSV persistence: header `theta,psi,c,q1,q2,q3`, 17 significant digits,
// exact round trip.
void save_csv(const Dataset& ds, const std::string& path);
Dataset load_csv(const std::string& path);

// Normalization-map persistence (same 17-digit contract).
void save_norm_map(const NormalizationMap& map, const std::string& path);
NormalizationMap load_norm_map(const std::string& path);

// Table-style statistics report (one row per column).
void save_stats(const std::array<ColumnStats, 6>& st, const std::string& path);

} // namespace tricept::data
