#include "tricept/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tricept/rng.hpp"

namespace tricept::mlp {

namespace {

constexpr double kLambdaFloor = 1e-20;
const std::array<const char*, 6> kColumnNames = {"theta", "psi", "c", "q1", "q2", "q3"};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double apply_activation(Activation a, double v) {
    switch (a) {
    case Activation::tansig: return tansig(v);
    case Activation::logsig: return logsig(v);
    case Activation::linear: return v;
    }
    throw InvalidArgumentError("unknown activation");
}

// Derivative expressed through the activation value itself; avoids
// re-evaluating the transcendental.
double activation_slope(Activation a, double value) {
    switch (a) {
    case Activation::tansig: return 1.0 - value * value;
    case Activation::logsig: return value * (1.0 - value);
    case Activation::linear: return 1.0;
    }
    throw InvalidArgumentError("unknown activation");
}

void check_sizes(const std::vector<std::size_t>& layer_sizes) {
    if (layer_sizes.size() < 2)
        throw InvalidArgumentError("network needs at least an input and an output layer");
    for (std::size_t s : layer_sizes)
        if (s < 1) throw InvalidArgumentError("every layer needs at least one unit");
}

void check_consistent(const MlpModel& m) {
    check_sizes(m.layer_sizes);
    const std::size_t nlayers = m.layer_sizes.size() - 1;
    if (m.weights.size() != nlayers || m.biases.size() != nlayers)
        throw StateError("model has the wrong number of weight layers");
    for (std::size_t l = 0; l < nlayers; ++l) {
        if (m.weights[l].rows() != m.layer_sizes[l + 1] || m.weights[l].cols() != m.layer_sizes[l])
            throw ShapeError("weight matrix " + std::to_string(l) + " does not match layer sizes");
        if (m.biases[l].size() != m.layer_sizes[l + 1])
            throw ShapeError("bias vector " + std::to_string(l) + " does not match layer sizes");
    }
}

MlpModel init_impl(const std::vector<std::size_t>& layer_sizes, Activation hidden,
                   std::uint64_t seed, const Vector* input_scales) {
    check_sizes(layer_sizes);
    if (input_scales) {
        if (input_scales->size() != layer_sizes.front())
            throw InvalidArgumentError("init_scaled: one scale per input column required");
        for (double s : *input_scales)
            if (!(std::isfinite(s) && s > 0.0))
                throw InvalidArgumentError("init_scaled: scales must be finite and positive");
    }

    MlpModel m;
    m.layer_sizes = layer_sizes;
    m.hidden_activation = hidden;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        Matrix w(layer_sizes[l + 1], layer_sizes[l]);
        for (std::size_t i = 0; i < w.rows(); ++i)
            for (std::size_t j = 0; j < w.cols(); ++j) {
                double v = rng.uniform(-0.5, 0.5);
                if (l == 0 && input_scales) v /= (*input_scales)[j];
                w(i, j) = v;
            }
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(layer_sizes[l + 1], 0.0);
    }
    return m;
}

// Forward pass keeping every layer's activations and slopes for backprop.
void forward_cached(const MlpModel& m, const Vector& input, std::vector<Vector>& acts,
                    std::vector<Vector>& slopes) {
    const std::size_t nlayers = m.layer_sizes.size() - 1;
    acts.resize(nlayers + 1);
    slopes.resize(nlayers + 1);
    acts[0] = input;
    for (std::size_t l = 0; l < nlayers; ++l) {
        const Activation act =
            (l + 1 == nlayers) ? m.output_activation : m.hidden_activation;
        const Matrix& w = m.weights[l];
        acts[l + 1].assign(w.rows(), 0.0);
        slopes[l + 1].assign(w.rows(), 0.0);
        for (std::size_t i = 0; i < w.rows(); ++i) {
            double v = m.biases[l][i];
            for (std::size_t j = 0; j < w.cols(); ++j) v += w(i, j) * acts[l][j];
            const double a = apply_activation(act, v);
            acts[l + 1][i] = a;
            slopes[l + 1][i] = activation_slope(act, a);
        }
    }
}

// Parameter vector layout: layer 0 weights row-major, layer 0 biases,
// layer 1 weights, layer 1 biases, ...
std::size_t layer_offset(const MlpModel& m, std::size_t layer) {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l)
        off += m.layer_sizes[l + 1] * m.layer_sizes[l] + m.layer_sizes[l + 1];
    return off;
}

void subtract_step(MlpModel& m, const Vector& step) {
    std::size_t idx = 0;
    for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
        Matrix& w = m.weights[l];
        for (std::size_t i = 0; i < w.rows(); ++i)
            for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) -= step[idx++];
        for (double& b : m.biases[l]) b -= step[idx++];
    }
    if (idx != step.size()) throw ShapeError("step length does not match parameter count");
}

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

} // namespace

Activation parse_activation(const std::string& name) {
    if (name == "tansig") return Activation::tansig;
    if (name == "logsig") return Activation::logsig;
    if (name == "linear") return Activation::linear;
    throw InvalidArgumentError("unknown activation '" + name + "' (tansig | logsig | linear)");
}

std::string activation_name(Activation a) {
    switch (a) {
    case Activation::tansig: return "tansig";
    case Activation::logsig: return "logsig";
    case Activation::linear: return "linear";
    }
    throw InvalidArgumentError("unknown activation");
}

double tansig(double v) { return std::tanh(v); }

double logsig(double v) {
    // Split by sign so the exponential never overflows.
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
}

std::size_t MlpModel::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
        n += layer_sizes[l + 1] * layer_sizes[l] + layer_sizes[l + 1];
    return n;
}

MlpModel init(const std::vector<std::size_t>& layer_sizes, Activation hidden_activation,
              std::uint64_t seed) {
    return init_impl(layer_sizes, hidden_activation, seed, nullptr);
}

MlpModel init_scaled(const std::vector<std::size_t>& layer_sizes, Activation hidden_activation,
                     std::uint64_t seed, const Vector& input_scales) {
    return init_impl(layer_sizes, hidden_activation, seed, &input_scales);
}

Vector forward(const MlpModel& model, const Vector& input) {
    check_consistent(model);
    if (input.size() != model.layer_sizes.front())
        throw ShapeError("forward: input length does not match the input layer");
    std::vector<Vector> acts, slopes;
    forward_cached(model, input, acts, slopes);
    return acts.back();
}

Matrix forward_batch(const MlpModel& model, const Matrix& inputs) {
    check_consistent(model);
    if (inputs.cols() != model.layer_sizes.front())
        throw ShapeError("forward_batch: input columns do not match the input layer");
    Matrix out(inputs.rows(), model.layer_sizes.back());
    std::vector<Vector> acts, slopes;
    for (std::size_t r = 0; r < inputs.rows(); ++r) {
        forward_cached(model, inputs.row(r), acts, slopes);
        out.set_row(r, acts.back());
    }
    return out;
}

double mse(const Matrix& outputs, const Matrix& targets) {
    if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols())
        throw ShapeError("mse: output and target shapes differ");
    if (outputs.rows() == 0 || outputs.cols() == 0)
        throw InvalidArgumentError("mse: empty matrices");
    double ss = 0.0;
    for (std::size_t i = 0; i < outputs.rows(); ++i)
        for (std::size_t j = 0; j < outputs.cols(); ++j) {
            const double d = targets(i, j) - outputs(i, j);
            ss += d * d;
        }
    return ss / static_cast<double>(outputs.rows() * outputs.cols());
}

JacobianResult jacobian(const MlpModel& model, const Matrix& inputs, const Matrix& targets) {
    check_consistent(model);
    if (inputs.cols() != model.layer_sizes.front())
        throw ShapeError("jacobian: input columns do not match the input layer");
    if (targets.cols() != model.layer_sizes.back())
        throw ShapeError("jacobian: target columns do not match the output layer");
    if (inputs.rows() != targets.rows())
        throw ShapeError("jacobian: inputs and targets disagree on sample count");
    if (inputs.rows() == 0) throw InvalidArgumentError("jacobian: no samples");

    const std::size_t nlayers = model.layer_sizes.size() - 1;
    const std::size_t nout = model.layer_sizes.back();
    const std::size_t nparams = model.param_count();

    std::vector<std::size_t> offsets(nlayers);
    for (std::size_t l = 0; l < nlayers; ++l) offsets[l] = layer_offset(model, l);

    JacobianResult res;
    res.jac = Matrix(inputs.rows() * nout, nparams);
    res.errors.assign(inputs.rows() * nout, 0.0);

    std::vector<Vector> acts, slopes;
    std::vector<Vector> delta(nlayers + 1);

    for (std::size_t s = 0; s < inputs.rows(); ++s) {
        forward_cached(model, inputs.row(s), acts, slopes);
        for (std::size_t k = 0; k < nout; ++k) {
            const std::size_t row = s * nout + k;
            res.errors[row] = targets(s, k) - acts.back()[k];

            // Backpropagate d(output_k)/d(param); the error derivative is
            // its negation since error = target - output.
            delta[nlayers].assign(nout, 0.0);
            delta[nlayers][k] = slopes[nlayers][k];
            for (std::size_t l = nlayers; l-- > 0;) {
                const Matrix& w = model.weights[l];
                std::size_t idx = offsets[l];
                for (std::size_t i = 0; i < w.rows(); ++i) {
                    const double d = delta[l + 1][i];
                    for (std::size_t j = 0; j < w.cols(); ++j)
                        res.jac(row, idx++) = -d * acts[l][j];
                }
                for (std::size_t i = 0; i < w.rows(); ++i)
                    res.jac(row, idx++) = -delta[l + 1][i];

                if (l == 0) break;
                delta[l].assign(w.cols(), 0.0);
                for (std::size_t j = 0; j < w.cols(); ++j) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < w.rows(); ++i) acc += w(i, j) * delta[l + 1][i];
                    delta[l][j] = acc * slopes[l][j];
                }
            }
        }
    }
    return res;
}

void LmOptions::validate() const {
    if (max_epochs < 1) throw InvalidArgumentError("max_epochs must be >= 1");
    if (!(goal_mse >= 0.0)) throw InvalidArgumentError("goal_mse must be >= 0");
    if (!(lambda_init > 0.0)) throw InvalidArgumentError("lambda_init must be > 0");
    if (!(lambda_up > 1.0)) throw InvalidArgumentError("lambda_up must be > 1");
    if (!(lambda_down > 0.0 && lambda_down < 1.0))
        throw InvalidArgumentError("lambda_down must be in (0, 1)");
    if (!(lambda_max > lambda_init)) throw InvalidArgumentError("lambda_max must exceed lambda_init");
    if (max_validation_failures < 1)
        throw InvalidArgumentError("max_validation_failures must be >= 1");
}

TrainResult train_lm(const MlpModel& model, const data::Dataset& train_set,
                     const data::Dataset& validation_set, const LmOptions& opts) {
    opts.validate();
    check_consistent(model);
    if (train_set.n() == 0) throw InvalidArgumentError("train_lm: empty training set");
    const bool has_val = validation_set.n() > 0;

    MlpModel cur = model;
    double lambda = opts.lambda_init;
    bool ever_accepted = false;

    TrainResult result;

    double best_val = 0.0;
    MlpModel best_model = cur;
    std::size_t val_failures = 0;
    if (has_val)
        best_val = mse(forward_batch(cur, validation_set.inputs), validation_set.targets);

    for (std::size_t epoch = 1; epoch <= opts.max_epochs; ++epoch) {
        JacobianResult jr = jacobian(cur, train_set.inputs, train_set.targets);
        double cur_mse = 0.0;
        for (double e : jr.errors) cur_mse += e * e;
        cur_mse /= static_cast<double>(jr.errors.size());

        if (epoch == 1 && cur_mse <= opts.goal_mse) {
            // Already at the goal before any step.
            std::optional<double> v;
            if (has_val) v = best_val;
            result.history.push_back(TrainRecord{0, cur_mse, v, lambda});
            break;
        }

        const Matrix jt = jr.jac.transposed();
        const Matrix a = matmul(jt, jr.jac);
        const Vector g = matvec(jt, jr.errors);

        bool accepted = false;
        double new_mse = cur_mse;
        double used_lambda = lambda;
        while (!accepted) {
            Matrix damped = a;
            for (std::size_t i = 0; i < damped.rows(); ++i) damped(i, i) += lambda;

            bool solved = true;
            Vector step;
            try {
                step = solve_spd(damped, g);
            } catch (const NumericalError&) {
                solved = false; // treat an unsolvable system like a rejected step
            }

            if (solved) {
                MlpModel trial = cur;
                subtract_step(trial, step);
                const double trial_mse =
                    mse(forward_batch(trial, train_set.inputs), train_set.targets);
                if (std::isfinite(trial_mse) && trial_mse < cur_mse) {
                    cur = std::move(trial);
                    new_mse = trial_mse;
                    used_lambda = lambda;
                    lambda = std::max(lambda * opts.lambda_down, kLambdaFloor);
                    accepted = true;
                    break;
                }
            }
            lambda *= opts.lambda_up;
            if (lambda > opts.lambda_max) break;
        }

        if (!accepted) {
            if (!ever_accepted)
                throw TrainingStalledError(
                    "train_lm: damping overflowed before any step was accepted");
            break; // converged as far as the damping range allows
        }
        ever_accepted = true;

        std::optional<double> val_mse;
        if (has_val)
            val_mse = mse(forward_batch(cur, validation_set.inputs), validation_set.targets);

        result.history.push_back(TrainRecord{epoch, new_mse, val_mse, used_lambda});

        if (has_val) {
            if (*val_mse < best_val) {
                best_val = *val_mse;
                best_model = cur;
                val_failures = 0;
            } else if (++val_failures >= opts.max_validation_failures) {
                break;
            }
        }
        if (new_mse <= opts.goal_mse) break;
    }

    result.model = has_val ? best_model : cur;
    return result;
}

void save(const MlpModel& model, const std::string& path,
          const std::optional<data::NormalizationMap>& map) {
    check_consistent(model);
    std::ofstream f(path);
    if (!f) throw IoError("save: cannot open " + path + " for writing");

    f << "tricept-mlp v1\n";
    f << "layers";
    for (std::size_t s : model.layer_sizes) f << ' ' << s;
    f << '\n';
    f << "hidden " << activation_name(model.hidden_activation) << '\n';
    f << "output " << activation_name(model.output_activation) << '\n';
    for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
        f << "layer " << l << '\n';
        const Matrix& w = model.weights[l];
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.cols(); ++j) {
                if (j) f << ' ';
                f << fmt17(w(i, j));
            }
            f << '\n';
        }
        for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
            if (i) f << ' ';
            f << fmt17(model.biases[l][i]);
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

LoadedModel load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("load: cannot open " + path);

    std::string line;
    std::size_t line_no = 0;

    if (!next_line(f, line, line_no) || line != "tricept-mlp v1")
        throw ParseError("expected 'tricept-mlp v1'", 1);

    if (!next_line(f, line, line_no)) throw ParseError("missing layers line", line_no + 1);
    auto toks = split_ws(line);
    if (toks.size() < 3 || toks[0] != "layers")
        throw ParseError("expected 'layers <sizes...>'", line_no);
    LoadedModel out;
    for (std::size_t i = 1; i < toks.size(); ++i) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(toks[i].c_str(), &end, 10);
        if (end == toks[i].c_str() || *end != '\0' || v == 0)
            throw ParseError("bad layer size '" + toks[i] + "'", line_no);
        out.model.layer_sizes.push_back(v);
    }

    for (const char* key : {"hidden", "output"}) {
        if (!next_line(f, line, line_no))
            throw ParseError(std::string("missing ") + key + " line", line_no + 1);
        toks = split_ws(line);
        if (toks.size() != 2 || toks[0] != key)
            throw ParseError(std::string("expected '") + key + " <activation>'", line_no);
        Activation act;
        try {
            act = parse_activation(toks[1]);
        } catch (const InvalidArgumentError& e) {
            throw ParseError(e.what(), line_no);
        }
        (key == std::string("hidden") ? out.model.hidden_activation
                                      : out.model.output_activation) = act;
    }

    for (std::size_t l = 0; l + 1 < out.model.layer_sizes.size(); ++l) {
        if (!next_line(f, line, line_no)) throw ParseError("missing layer header", line_no + 1);
        if (line != "layer " + std::to_string(l))
            throw ParseError("expected 'layer " + std::to_string(l) + "'", line_no);
        Matrix w(out.model.layer_sizes[l + 1], out.model.layer_sizes[l]);
        for (std::size_t i = 0; i < w.rows(); ++i) {
            if (!next_line(f, line, line_no))
                throw ParseError("truncated weight matrix", line_no + 1);
            toks = split_ws(line);
            if (toks.size() != w.cols())
                throw ParseError("expected " + std::to_string(w.cols()) + " weights", line_no);
            for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = parse_num(toks[j], line_no);
        }
        if (!next_line(f, line, line_no)) throw ParseError("truncated bias vector", line_no + 1);
        toks = split_ws(line);
        if (toks.size() != out.model.layer_sizes[l + 1])
            throw ParseError("expected " + std::to_string(out.model.layer_sizes[l + 1]) + " biases",
                             line_no);
        Vector b(toks.size());
        for (std::size_t i = 0; i < toks.size(); ++i) b[i] = parse_num(toks[i], line_no);
        out.model.weights.push_back(std::move(w));
        out.model.biases.push_back(std::move(b));
    }

    if (!next_line(f, line, line_no)) throw ParseError("missing 'end'", line_no + 1);
    if (line == "normmap") {
        data::NormalizationMap map{};
        for (std::size_t c = 0; c < 6; ++c) {
            if (!next_line(f, line, line_no))
                throw ParseError("truncated normalization map", line_no + 1);
            toks = split_ws(line);
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

} // namespace tricept::mlp
