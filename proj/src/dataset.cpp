#include "tricept/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tricept/rng.hpp"

namespace tricept::data {

namespace {

constexpr const char* kCsvHeader = "theta,psi,c,q1,q2,q3";
const std::array<const char*, 6> kColumnNames = {"theta", "psi", "c", "q1", "q2", "q3"};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double column_value(const Dataset& ds, std::size_t row, std::size_t col) {
    return col < 3 ? ds.inputs(row, col) : ds.targets(row, col - 3);
}

} // namespace

SamplingScheme parse_scheme(const std::string& name) {
    if (name == "grid") return SamplingScheme::grid;
    if (name == "random") return SamplingScheme::random;
    throw InvalidArgumentError("unknown sampling scheme '" + name + "' (grid | random)");
}

std::string scheme_name(SamplingScheme s) {
    return s == SamplingScheme::grid ? "grid" : "random";
}

namespace {

std::vector<double> grid_axis(double lo, double hi, std::size_t k) {
    std::vector<double> v(k);
    if (k == 1) {
        v[0] = 0.5 * (lo + hi);
        return v;
    }
    for (std::size_t i = 0; i < k; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
    return v;
}

} // namespace

Dataset generate(const TriceptGeometry& geom, const PoseDomain& domain,
                 SamplingScheme scheme, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw InvalidArgumentError("generate: n must be >= 1");

    Dataset ds{Matrix(n, 3), Matrix(n, 3)};

    if (scheme == SamplingScheme::grid) {
        std::size_t k = 1;
        while (k * k * k < n) ++k;
        const auto thetas = grid_axis(domain.theta_min, domain.theta_max, k);
        const auto psis = grid_axis(domain.psi_min, domain.psi_max, k);
        const auto cs = grid_axis(domain.c_min, domain.c_max, k);
        std::size_t row = 0;
        for (std::size_t it = 0; it < k && row < n; ++it)
            for (std::size_t ip = 0; ip < k && row < n; ++ip)
                for (std::size_t ic = 0; ic < k && row < n; ++ic) {
                    ds.inputs(row, 0) = thetas[it];
                    ds.inputs(row, 1) = psis[ip];
                    ds.inputs(row, 2) = cs[ic];
                    ++row;
                }
    } else {
        Rng rng(seed);
        for (std::size_t row = 0; row < n; ++row) {
            ds.inputs(row, 0) = rng.uniform(domain.theta_min, domain.theta_max);
            ds.inputs(row, 1) = rng.uniform(domain.psi_min, domain.psi_max);
            ds.inputs(row, 2) = rng.uniform(domain.c_min, domain.c_max);
        }
    }

    for (std::size_t row = 0; row < n; ++row) {
        try {
            const Pose pose(ds.inputs(row, 0), ds.inputs(row, 1), ds.inputs(row, 2));
            const LegLengths q = inverse_kinematics(geom, pose);
            ds.targets(row, 0) = q.q1;
            ds.targets(row, 1) = q.q2;
            ds.targets(row, 2) = q.q3;
        } catch (const Error& e) {
            throw SingularConfigError(
                "generate: inverse kinematics failed at pose (theta=" +
                fmt17(ds.inputs(row, 0)) + ", psi=" + fmt17(ds.inputs(row, 1)) +
                ", c=" + fmt17(ds.inputs(row, 2)) + "): " + e.what());
        }
    }
    return ds;
}

std::array<ColumnStats, 6> stats(const Dataset& ds) {
    const std::size_t n = ds.n();
    if (n < 1) throw InvalidArgumentError("stats: dataset is empty");

    std::array<ColumnStats, 6> out;
    std::vector<double> col(n);
    for (std::size_t c = 0; c < 6; ++c) {
        for (std::size_t i = 0; i < n; ++i) col[i] = column_value(ds, i, c);

        double mn = col[0], mx = col[0], sum = 0.0;
        for (double v : col) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            sum += v;
        }
        const double mean = sum / static_cast<double>(n);

        double ss = 0.0;
        for (double v : col) ss += (v - mean) * (v - mean);
        const double variance = ss / static_cast<double>(n);

        std::vector<double> sorted = col;
        std::sort(sorted.begin(), sorted.end());
        const double median = (n % 2 == 1)
                                  ? sorted[n / 2]
                                  : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

        out[c] = ColumnStats{mn, mx, mean, median, variance};
    }
    return out;
}

std::pair<Dataset, NormalizationMap> normalize(const Dataset& ds) {
    const std::size_t n = ds.n();
    if (n < 1) throw InvalidArgumentError("normalize: dataset is empty");

    NormalizationMap map{};
    for (std::size_t c = 0; c < 6; ++c) {
        double mn = column_value(ds, 0, c), mx = mn;
        for (std::size_t i = 1; i < n; ++i) {
            const double v = column_value(ds, i, c);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        if (!(mx > mn))
            throw NormalizationError(std::string("normalize: column ") + kColumnNames[c] +
                                     " is constant");
        map.min[c] = mn;
        map.max[c] = mx;
    }

    Dataset out{Matrix(n, 3), Matrix(n, 3)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < 6; ++c) {
            const double v = (column_value(ds, i, c) - map.min[c]) / (map.max[c] - map.min[c]);
            if (c < 3)
                out.inputs(i, c) = v;
            else
                out.targets(i, c - 3) = v;
        }
    return {out, map};
}

Dataset denormalize(const Dataset& ds, const NormalizationMap& map) {
    if (ds.inputs.cols() != 3 || ds.targets.cols() != 3)
        throw ShapeError("denormalize: dataset must have 3 input and 3 target columns");
    const std::size_t n = ds.n();
    Dataset out{Matrix(n, 3), Matrix(n, 3)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < 6; ++c) {
            const double v = column_value(ds, i, c) * (map.max[c] - map.min[c]) + map.min[c];
            if (c < 3)
                out.inputs(i, c) = v;
            else
                out.targets(i, c - 3) = v;
        }
    return out;
}

SplitIndices split(const Dataset& ds, double train_ratio, double validation_ratio,
                   double test_ratio, std::uint64_t seed) {
    const std::size_t n = ds.n();
    if (train_ratio < 0.0 || validation_ratio < 0.0 || test_ratio < 0.0)
        throw SplitError("split: ratios must be non-negative");
    if (std::abs(train_ratio + validation_ratio + test_ratio - 1.0) > 1e-9)
        throw SplitError("split: ratios must sum to 1");
    if (n == 0) throw SplitError("split: dataset is empty");

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(seed);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(perm[i], perm[j]);
    }

    const auto n_train = static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(n)));
    const auto n_val =
        static_cast<std::size_t>(std::floor(validation_ratio * static_cast<double>(n)));
    if (n_train + n_val > n) throw SplitError("split: partitions exceed dataset size");
    const std::size_t n_test = n - n_train - n_val;

    if (train_ratio > 0.0 && n_train == 0) throw SplitError("split: train partition came out empty");
    if (validation_ratio > 0.0 && n_val == 0)
        throw SplitError("split: validation partition came out empty");
    if (test_ratio > 0.0 && n_test == 0) throw SplitError("split: test partition came out empty");

    SplitIndices idx;
    idx.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    idx.validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                          perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    idx.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
    return idx;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out{Matrix(indices.size(), 3), Matrix(indices.size(), 3)};
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= ds.n()) throw InvalidArgumentError("subset: index out of range");
        for (std::size_t c = 0; c < 3; ++c) {
            out.inputs(i, c) = ds.inputs(indices[i], c);
            out.targets(i, c) = ds.targets(indices[i], c);
        }
    }
    return out;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("save_csv: cannot open " + path + " for writing");
    f << kCsvHeader << "\n";
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t c = 0; c < 6; ++c) {
            if (c) f << ',';
            f << fmt17(column_value(ds, i, c));
        }
        f << '\n';
    }
    if (!f) throw IoError("save_csv: write failed for " + path);
}

Dataset load_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("load_csv: cannot open " + path);

    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(f, line)) throw ParseError("load_csv: missing header", 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw ParseError("load_csv: expected header '" + std::string(kCsvHeader) + "'", line_no);

    std::vector<std::array<double, 6>> rows;
    while (std::getline(f, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::array<double, 6> vals{};
        std::size_t pos = 0;
        for (std::size_t c = 0; c < 6; ++c) {
            const std::size_t comma = line.find(',', pos);
            const std::string tok = line.substr(pos, comma == std::string::npos
                                                         ? std::string::npos
                                                         : comma - pos);
            if (tok.empty()) throw ParseError("load_csv: empty field", line_no);
            char* end = nullptr;
            vals[c] = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw ParseError("load_csv: malformed number '" + tok + "'", line_no);
            if (!std::isfinite(vals[c]))
                throw ParseError("load_csv: non-finite value '" + tok + "'", line_no);
            if (c < 5) {
                if (comma == std::string::npos)
                    throw ParseError("load_csv: expected 6 columns", line_no);
                pos = comma + 1;
            } else if (comma != std::string::npos) {
                throw ParseError("load_csv: expected 6 columns", line_no);
            }
        }
        rows.push_back(vals);
    }

    Dataset ds{Matrix(rows.size(), 3), Matrix(rows.size(), 3)};
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < 6; ++c) {
            if (c < 3)
                ds.inputs(i, c) = rows[i][c];
            else
                ds.targets(i, c - 3) = rows[i][c];
        }
    return ds;
}

void save_norm_map(const NormalizationMap& map, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("save_norm_map: cannot open " + path + " for writing");
    f << "tricept-normmap v1\n";
    for (std::size_t c = 0; c < 6; ++c)
        f << kColumnNames[c] << ' ' << fmt17(map.min[c]) << ' ' << fmt17(map.max[c]) << '\n';
    if (!f) throw IoError("save_norm_map: write failed for " + path);
}

NormalizationMap load_norm_map(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("load_norm_map: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line != "tricept-normmap v1")
        throw ParseError("load_norm_map: bad version line", 1);
    NormalizationMap map{};
    for (std::size_t c = 0; c < 6; ++c) {
        if (!std::getline(f, line)) throw ParseError("load_norm_map: truncated file", c + 2);
        std::istringstream ss(line);
        std::string name;
        if (!(ss >> name >> map.min[c] >> map.max[c]) || name != kColumnNames[c])
            throw ParseError("load_norm_map: malformed column line", c + 2);
        if (!(map.max[c] > map.min[c]))
            throw ParseError("load_norm_map: max must exceed min", c + 2);
    }
    return map;
}

void save_stats(const std::array<ColumnStats, 6>& st, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("save_stats: cannot open " + path + " for writing");
    f << "column min max mean median variance\n";
    for (std::size_t c = 0; c < 6; ++c) {
        f << kColumnNames[c] << ' ' << fmt17(st[c].min) << ' ' << fmt17(st[c].max) << ' '
          << fmt17(st[c].mean) << ' ' << fmt17(st[c].median) << ' ' << fmt17(st[c].variance)
          << '\n';
    }
    if (!f) throw IoError("save_stats: write failed for " + path);
}

} // namespace tricept::data
