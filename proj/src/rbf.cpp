#include "tricept/rbf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace tricept::rbf {

namespace {

const std::array<const char*, 6> kColumnNames = {"theta", "psi", "c", "q1", "q2", "q3"};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_consistent(const RbfModel& m) {
    if (!(std::isfinite(m.beta) && m.beta > 0.0))
        throw StateError("model beta must be finite and positive");
    const std::size_t wrows = m.centers.rows() + (m.has_bias ? 1 : 0);
    if (m.weights.rows() != wrows)
        throw ShapeError("weight rows do not match neuron count");
    if (m.weights.cols() == 0) throw ShapeError("model has no output columns");
    if (m.centers.rows() > 0 && m.centers.cols() == 0)
        throw ShapeError("centers have no input columns");
}

double sq_dist_row(const Matrix& a, std::size_t ra, const Matrix& b, std::size_t rb) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        const double d = a(ra, c) - b(rb, c);
        s += d * d;
    }
    return s;
}

// Kernel column of one candidate center against every training sample.
void kernel_column(const Matrix& x, std::size_t center_row, double beta, Vector& col) {
    const std::size_t n = x.rows();
    col.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        col[i] = gaussian(sq_dist_row(x, i, x, center_row), beta);
}

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Design matrix for the chosen centers (bias column first when present).
Matrix design_matrix(const Matrix& x, const std::vector<std::size_t>& chosen, double beta,
                     bool bias) {
    const std::size_t n = x.rows();
    Matrix p(n, chosen.size() + (bias ? 1 : 0));
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t col = 0;
        if (bias) p(i, col++) = 1.0;
        for (std::size_t j : chosen) p(i, col++) = gaussian(sq_dist_row(x, i, x, j), beta);
    }
    return p;
}

double residual_sse(const Matrix& p, const Matrix& w, const Matrix& t, Matrix& residual) {
    const Matrix fit = matmul(p, w);
    residual = Matrix(t.rows(), t.cols());
    double sse = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j) {
            const double r = t(i, j) - fit(i, j);
            residual(i, j) = r;
            sse += r * r;
        }
    return sse;
}

} // namespace

double gaussian(double squared_distance, double beta) {
    return std::exp(-beta * squared_distance);
}

double spread_to_beta(double spread) {
    if (!(std::isfinite(spread) && spread > 0.0))
        throw InvalidArgumentError("spread must be finite and positive");
    return std::log(2.0) / (spread * spread);
}

Vector forward(const RbfModel& model, const Vector& input) {
    check_consistent(model);
    if (model.centers.rows() > 0 && input.size() != model.centers.cols())
        throw ShapeError("forward: input length does not match the centers");
    Vector out(model.weights.cols(), 0.0);
    std::size_t wrow = 0;
    if (model.has_bias) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = model.weights(0, j);
        wrow = 1;
    }
    for (std::size_t c = 0; c < model.centers.rows(); ++c, ++wrow) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < model.centers.cols(); ++k) {
            const double d = input[k] - model.centers(c, k);
            d2 += d * d;
        }
        const double phi = gaussian(d2, model.beta);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += phi * model.weights(wrow, j);
    }
    return out;
}

Matrix forward_batch(const RbfModel& model, const Matrix& inputs) {
    check_consistent(model);
    Matrix out(inputs.rows(), model.weights.cols());
    for (std::size_t r = 0; r < inputs.rows(); ++r) out.set_row(r, forward(model, inputs.row(r)));
    return out;
}

void RbfOptions::validate() const {
    if (!(std::isfinite(spread) && spread > 0.0))
        throw InvalidArgumentError("spread must be finite and positive");
    if (!(goal_mse >= 0.0)) throw InvalidArgumentError("goal_mse must be >= 0");
}

RbfTrainResult train_incremental(const data::Dataset& train_set, const RbfOptions& opts) {
    opts.validate();
    const std::size_t n = train_set.n();
    if (n == 0) throw InvalidArgumentError("train_incremental: empty training set");
    const Matrix& x = train_set.inputs;
    const Matrix& t = train_set.targets;
    const std::size_t nout = t.cols();
    const double beta = spread_to_beta(opts.spread);

    RbfTrainResult result;
    result.model.spread = opts.spread;
    result.model.beta = beta;
    result.model.has_bias = opts.include_bias;
    result.model.centers = Matrix(0, x.cols());

    std::vector<std::size_t> chosen;
    std::vector<Vector> basis; // orthonormal span of the adopted columns

    // Stage 0: bias-only fit (column means) or the zero model.
    Matrix weights(opts.include_bias ? 1 : 0, nout);
    Matrix residual = t;
    double sse = 0.0;
    if (opts.include_bias) {
        Vector ones(n, 1.0 / std::sqrt(static_cast<double>(n)));
        basis.push_back(std::move(ones));
        for (std::size_t j = 0; j < nout; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += t(i, j);
            mean /= static_cast<double>(n);
            weights(0, j) = mean;
        }
    }
    {
        Matrix p = design_matrix(x, chosen, beta, opts.include_bias);
        if (p.cols() == 0) {
            residual = t;
            sse = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < nout; ++j) sse += t(i, j) * t(i, j);
        } else {
            sse = residual_sse(p, weights, t, residual);
        }
    }
    const double denom = static_cast<double>(n * nout);
    double cur_mse = sse / denom;

    if (cur_mse <= opts.goal_mse || opts.max_neurons == 0) {
        result.model.weights = weights;
        result.history.push_back(GrowthRecord{0, cur_mse});
        return result;
    }

    Vector col, u;
    std::vector<char> taken(n, 0);

    while (chosen.size() < opts.max_neurons) {
        double best_gain = -1.0;
        std::size_t best_idx = n;
        Vector best_u;

        for (std::size_t j = 0; j < n; ++j) {
            if (taken[j]) continue;
            kernel_column(x, j, beta, col);
            const double col_norm = std::sqrt(dot(col, col));

            // Orthogonalize against the adopted span; one repeat pass keeps
            // the basis orthogonal to near machine precision.
            u = col;
            for (int pass = 0; pass < 2; ++pass)
                for (const Vector& q : basis) {
                    const double proj = dot(q, u);
                    for (std::size_t i = 0; i < n; ++i) u[i] -= proj * q[i];
                }
            const double un = std::sqrt(dot(u, u));
            if (!(un > 1e-8 * col_norm)) continue; // numerically inside the span

            for (std::size_t i = 0; i < n; ++i) u[i] /= un;
            double gain = 0.0;
            for (std::size_t j2 = 0; j2 < nout; ++j2) {
                double pr = 0.0;
                for (std::size_t i = 0; i < n; ++i) pr += u[i] * residual(i, j2);
                gain += pr * pr;
            }
            if (gain > best_gain) {
                best_gain = gain;
                best_idx = j;
                best_u = u;
            }
        }

        if (best_idx == n) break; // every remaining column already lies in the span

        taken[best_idx] = 1;
        chosen.push_back(best_idx);
        basis.push_back(std::move(best_u));

        const Matrix p = design_matrix(x, chosen, beta, opts.include_bias);
        weights = least_squares(p, t);
        sse = residual_sse(p, weights, t, residual);
        cur_mse = sse / denom;
        result.history.push_back(GrowthRecord{chosen.size(), cur_mse});

        if (cur_mse <= opts.goal_mse) break;
    }

    Matrix centers(chosen.size(), x.cols());
    for (std::size_t i = 0; i < chosen.size(); ++i) centers.set_row(i, x.row(chosen[i]));
    result.model.centers = std::move(centers);
    result.model.weights = std::move(weights);
    return result;
}

void save(const RbfModel& model, const std::string& path,
          const std::optional<data::NormalizationMap>& map) {
    check_consistent(model);
    std::ofstream f(path);
    if (!f) throw IoError("save: cannot open " + path + " for writing");

    f << "tricept-rbf v1\n";
    f << "spread " << fmt17(model.spread) << '\n';
    f << "beta " << fmt17(model.beta) << '\n';
    f << "bias " << (model.has_bias ? 1 : 0) << '\n';
    f << "neurons " << model.centers.rows() << '\n';
    f << "inputs " << model.centers.cols() << '\n';
    f << "outputs " << model.weights.cols() << '\n';
    f << "centers\n";
    for (std::size_t i = 0; i < model.centers.rows(); ++i) {
        for (std::size_t j = 0; j < model.centers.cols(); ++j) {
            if (j) f << ' ';
            f << fmt17(model.centers(i, j));
        }
        f << '\n';
    }
    f << "weights\n";
    for (std::size_t i = 0; i < model.weights.rows(); ++i) {
        for (std::size_t j = 0; j < model.weights.cols(); ++j) {
            if (j) f << ' ';
            f << fmt17(model.weights(i, j));
        }
        f << '\n';
    }
    if (map) {
        f << "normmap\n";
        for (std::size_t c = 0; c < 6; ++c)
            f << kColumnNames[c] << ' ' << fmt17(map->min[c]) << ' ' << fmt17(map->max[c]) << '\n';
    }
    f << "end\n";
    if (!f) throw IoError("save: write failed for " + path);
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

double parse_num(const std::string& tok, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
        throw ParseError("malformed number '" + tok + "'", line_no);
    return v;
}

bool next_line(std::ifstream& f, std::string& line, std::size_t& line_no) {
    if (!std::getline(f, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

std::size_t parse_count(std::ifstream& f, const char* key, std::size_t& line_no) {
    std::string line;
    if (!next_line(f, line, line_no))
        throw ParseError(std::string("missing ") + key + " line", line_no + 1);
    const auto toks = split_ws(line);
    if (toks.size() != 2 || toks[0] != key)
        throw ParseError(std::string("expected '") + key + " <value>'", line_no);
    char* end = nullptr;
    const unsigned long v = std::strtoul(toks[1].c_str(), &end, 10);
    if (end == toks[1].c_str() || *end != '\0')
        throw ParseError(std::string("bad ") + key + " value '" + toks[1] + "'", line_no);
    return v;
}

Matrix parse_block(std::ifstream& f, const char* key, std::size_t rows, std::size_t cols,
                   std::size_t& line_no) {
    std::string line;
    if (!next_line(f, line, line_no) || line != key)
        throw ParseError(std::string("expected '") + key + "'", line_no);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!next_line(f, line, line_no))
            throw ParseError(std::string("truncated ") + key + " block", line_no + 1);
        const auto toks = split_ws(line);
        if (toks.size() != cols)
            throw ParseError("expected " + std::to_string(cols) + " values", line_no);
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = parse_num(toks[j], line_no);
    }
    return m;
}

} // namespace

LoadedModel load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("load: cannot open " + path);

    std::string line;
    std::size_t line_no = 0;
    if (!next_line(f, line, line_no) || line != "tricept-rbf v1")
        throw ParseError("expected 'tricept-rbf v1'", 1);

    LoadedModel out;
    for (const char* key : {"spread", "beta"}) {
        if (!next_line(f, line, line_no))
            throw ParseError(std::string("missing ") + key + " line", line_no + 1);
        const auto toks = split_ws(line);
        if (toks.size() != 2 || toks[0] != key)
            throw ParseError(std::string("expected '") + key + " <value>'", line_no);
        (key == std::string("spread") ? out.model.spread : out.model.beta) =
            parse_num(toks[1], line_no);
    }
    const std::size_t bias = parse_count(f, "bias", line_no);
    if (bias > 1) throw ParseError("bias must be 0 or 1", line_no);
    out.model.has_bias = bias == 1;
    const std::size_t neurons = parse_count(f, "neurons", line_no);
    const std::size_t inputs = parse_count(f, "inputs", line_no);
    const std::size_t outputs = parse_count(f, "outputs", line_no);

    out.model.centers = parse_block(f, "centers", neurons, inputs, line_no);
    out.model.weights = parse_block(f, "weights", neurons + bias, outputs, line_no);

    if (!next_line(f, line, line_no)) throw ParseError("missing 'end'", line_no + 1);
    if (line == "normmap") {
        data::NormalizationMap map{};
        for (std::size_t c = 0; c < 6; ++c) {
            if (!next_line(f, line, line_no))
                throw ParseError("truncated normalization map", line_no + 1);
            const auto toks = split_ws(line);
            if (toks.size() != 3 || toks[0] != kColumnNames[c])
                throw ParseError(std::string("expected '") + kColumnNames[c] + " <min> <max>'",
                                 line_no);
            map.min[c] = parse_num(toks[1], line_no);
            map.max[c] = parse_num(toks[2], line_no);
            if (!(map.max[c] > map.min[c]))
                throw ParseError("normalization max must exceed min", line_no);
        }
        out.map = map;
        if (!next_line(f, line, line_no)) throw ParseError("missing 'end'", line_no + 1);
    }
    if (line != "end") throw ParseError("expected 'end'", line_no);

    check_consistent(out.model);
    return out;
}

} // namespace tricept::rbf
