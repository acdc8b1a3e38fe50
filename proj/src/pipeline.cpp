#include "tricept/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tricept/evaluation.hpp"

namespace fs = std::filesystem;

namespace tricept::pipeline {

namespace {

constexpr double kErrorFractionThreshold = 1e-4;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string dataset_file(Space s) {
    return s == Space::normalized ? "dataset_normalized.csv" : "dataset.csv";
}

Vector domain_scales(const PoseDomain& d) {
    auto mag = [](double lo, double hi) {
        const double m = std::max(std::abs(lo), std::abs(hi));
        return m > 0.0 ? m : 1.0;
    };
    return {mag(d.theta_min, d.theta_max), mag(d.psi_min, d.psi_max), mag(d.c_min, d.c_max)};
}

struct EvalCell {
    std::string label;
    Space space;
    eval::EvalResult result;
    double fraction = 0.0;
    double goal = 0.0;
};

void write_eval_file(const EvalCell& cell, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << "tricept-eval v1\n";
    f << "label " << cell.label << '\n';
    f << "mse " << fmt17(cell.result.mse) << '\n';
    f << "per_output_mse " << fmt17(cell.result.per_output_mse[0]) << ' '
      << fmt17(cell.result.per_output_mse[1]) << ' ' << fmt17(cell.result.per_output_mse[2])
      << '\n';
    f << "max_abs_error " << fmt17(cell.result.max_abs_error) << '\n';
    f << "n " << cell.result.n << '\n';
    f << "fraction_below " << fmt17(kErrorFractionThreshold) << ' ' << fmt17(cell.fraction)
      << '\n';
    f << "goal " << fmt17(cell.goal) << '\n';
    f << "end\n";
    if (!f) throw IoError("write failed for " + path);
}

eval::CompareEntry read_eval_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    auto next = [&](const char* what) {
        if (!std::getline(f, line)) throw ParseError(std::string("missing ") + what, line_no + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
    };
    auto field = [&](const char* key) {
        next(key);
        const std::string prefix = std::string(key) + ' ';
        if (line.rfind(prefix, 0) != 0)
            throw ParseError(std::string("expected '") + key + " ...'", line_no);
        return line.substr(prefix.size());
    };
    auto num = [&](const std::string& tok) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
            throw ParseError("malformed number '" + tok + "'", line_no);
        return v;
    };

    next("version line");
    if (line != "tricept-eval v1") throw ParseError("expected 'tricept-eval v1'", line_no);
    eval::CompareEntry entry;
    entry.label = field("label");
    entry.result.mse = num(field("mse"));
    {
        std::istringstream toks(field("per_output_mse"));
        std::string tok;
        for (std::size_t j = 0; j < 3; ++j) {
            if (!(toks >> tok)) throw ParseError("per_output_mse needs three values", line_no);
            entry.result.per_output_mse[j] = num(tok);
        }
    }
    entry.result.max_abs_error = num(field("max_abs_error"));
    entry.result.n = static_cast<std::size_t>(num(field("n")));
    field("fraction_below"); // recorded for inspection; not part of the table
    entry.goal_mse = num(field("goal"));
    next("'end'");
    if (line != "end") throw ParseError("expected 'end'", line_no);
    return entry;
}

} // namespace

Space parse_space(const std::string& name) {
    if (name == "normalized") return Space::normalized;
    if (name == "real") return Space::real;
    throw InvalidArgumentError("unknown space '" + name + "' (normalized | real)");
}

std::string space_name(Space s) { return s == Space::normalized ? "normalized" : "real"; }

int run_gen_data(const config::RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
    cfg.validate();
    ensure_dir(out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    const data::Dataset ds =
        data::generate(cfg.geometry, cfg.domain, cfg.scheme, cfg.n_samples, cfg.sampling_seed);
    data::save_csv(ds, join(out_dir, "dataset.csv"));
    data::save_stats(data::stats(ds), join(out_dir, "stats.txt"));

    const auto [normalized, map] = data::normalize(ds);
    data::save_csv(normalized, join(out_dir, "dataset_normalized.csv"));
    data::save_norm_map(map, join(out_dir, "normmap.txt"));

    log << "gen-data: " << ds.n() << " poses (" << data::scheme_name(cfg.scheme) << ") in "
        << seconds_since(t0) << " s -> " << out_dir << "\n";
    return 0;
}

int run_train_mlp(const config::RunConfig& cfg, const std::string& data_dir,
                  const std::string& out_dir, Space space, std::ostream& log) {
    cfg.validate();
    ensure_dir(out_dir);

    const data::Dataset ds = data::load_csv(join(data_dir, dataset_file(space)));
    const data::SplitIndices idx =
        data::split(ds, cfg.train_ratio, cfg.validation_ratio, cfg.test_ratio, cfg.split_seed);
    const data::Dataset train = data::subset(ds, idx.train);
    const data::Dataset validation = data::subset(ds, idx.validation);

    std::vector<std::size_t> layers;
    layers.push_back(ds.inputs.cols());
    layers.insert(layers.end(), cfg.mlp_hidden.begin(), cfg.mlp_hidden.end());
    layers.push_back(ds.targets.cols());

    mlp::MlpModel model =
        space == Space::normalized
            ? mlp::init(layers, cfg.mlp_hidden_activation, cfg.mlp_seed)
            : mlp::init_scaled(layers, cfg.mlp_hidden_activation, cfg.mlp_seed,
                               domain_scales(cfg.domain));
    model.output_activation = cfg.mlp_output_activation;

    const auto t0 = std::chrono::steady_clock::now();
    const mlp::TrainResult res = mlp::train_lm(model, train, validation, cfg.mlp_options);
    const double elapsed = seconds_since(t0);

    const std::string tag = "mlp_" + space_name(space);
    std::optional<data::NormalizationMap> map;
    if (space == Space::normalized) map = data::load_norm_map(join(data_dir, "normmap.txt"));
    mlp::save(res.model, join(out_dir, tag + ".model"), map);
    eval::export_training_curve(res.history, join(out_dir, tag + "_curve.csv"));

    const auto& last = res.history.back();
    log << "train-mlp (" << space_name(space) << "): " << last.epoch << " epochs, train mse "
        << last.mse_train;
    if (last.mse_validation) log << ", validation mse " << *last.mse_validation;
    log << ", " << elapsed << " s\n";
    return 0;
}

int run_train_rbf(const config::RunConfig& cfg, const std::string& data_dir,
                  const std::string& out_dir, Space space, std::ostream& log) {
    cfg.validate();
    ensure_dir(out_dir);

    const data::Dataset ds = data::load_csv(join(data_dir, dataset_file(space)));

    rbf::RbfOptions opts;
    opts.max_neurons = cfg.rbf_max_neurons;
    opts.goal_mse = cfg.rbf_goal_mse;
    opts.spread =
        space == Space::normalized ? cfg.rbf_spread_normalized : cfg.rbf_spread_real;
    opts.include_bias = cfg.rbf_include_bias;

    const auto t0 = std::chrono::steady_clock::now();
    const rbf::RbfTrainResult res = rbf::train_incremental(ds, opts);
    const double elapsed = seconds_since(t0);

    const std::string tag = "rbf_" + space_name(space);
    std::optional<data::NormalizationMap> map;
    if (space == Space::normalized) map = data::load_norm_map(join(data_dir, "normmap.txt"));
    rbf::save(res.model, join(out_dir, tag + ".model"), map);
    eval::export_training_curve(res.history, join(out_dir, tag + "_curve.csv"));

    log << "train-rbf (" << space_name(space) << "): " << res.model.neuron_count()
        << " neurons, mse " << res.history.back().mse << ", " << elapsed << " s\n";
    return 0;
}

int run_eval(const config::RunConfig& cfg, const std::string& data_dir,
             const std::string& models_dir, const std::string& out_dir, std::ostream& log) {
    cfg.validate();
    ensure_dir(out_dir);

    std::vector<eval::CompareEntry> entries;
    for (const Space space : {Space::normalized, Space::real}) {
        const data::Dataset ds = data::load_csv(join(data_dir, dataset_file(space)));
        const double goal = space == Space::normalized ? cfg.report_goal_normalized
                                                       : cfg.report_goal_real;
        for (const char* kind : {"mlp", "rbf"}) {
            EvalCell cell;
            cell.label = std::string(kind) + "_" + space_name(space);
            cell.space = space;
            cell.goal = goal;

            eval::Predictor predict;
            if (kind == std::string("mlp")) {
                const mlp::LoadedModel lm = mlp::load(join(models_dir, cell.label + ".model"));
                predict = [model = lm.model](const Matrix& x) {
                    return mlp::forward_batch(model, x);
                };
            } else {
                const rbf::LoadedModel lr = rbf::load(join(models_dir, cell.label + ".model"));
                predict = [model = lr.model](const Matrix& x) {
                    return rbf::forward_batch(model, x);
                };
            }

            cell.result = eval::evaluate(predict, ds);
            const Vector errors = eval::collect_errors(predict, ds);
            cell.fraction = eval::fraction_below(errors, kErrorFractionThreshold);

            eval::export_histogram(eval::histogram(errors, cfg.histogram_bins),
                                   join(out_dir, "hist_" + cell.label + ".csv"));
            write_eval_file(cell, join(out_dir, "eval_" + cell.label + ".txt"));

            entries.push_back(eval::CompareEntry{cell.label, cell.result, cell.goal});
        }
    }

    const eval::CompareReport rep = eval::compare_report(entries);
    std::ofstream f(join(out_dir, "report.txt"));
    if (!f) throw IoError("cannot open report.txt for writing");
    f << rep.text;
    if (!f) throw IoError("write failed for report.txt");
    log << rep.text;
    return rep.all_pass ? 0 : 1;
}

int run_report(const std::string& eval_dir, const std::string& out_dir, std::ostream& log) {
    ensure_dir(out_dir);
    std::vector<eval::CompareEntry> entries;
    for (const char* label : {"mlp_normalized", "rbf_normalized", "mlp_real", "rbf_real"})
        entries.push_back(read_eval_file(join(eval_dir, std::string("eval_") + label + ".txt")));

    const eval::CompareReport rep = eval::compare_report(entries);
    std::ofstream f(join(out_dir, "report.txt"));
    if (!f) throw IoError("cannot open report.txt for writing");
    f << rep.text;
    if (!f) throw IoError("write failed for report.txt");
    log << rep.text;
    return rep.all_pass ? 0 : 1;
}

int run_predict(const config::RunConfig& cfg, const std::string& model_path, const Pose& pose,
                std::ostream& out, std::ostream& warn) {
    cfg.validate();

    std::string version;
    {
        std::ifstream f(model_path);
        if (!f) throw IoError("cannot open " + model_path);
        std::getline(f, version);
        if (!version.empty() && version.back() == '\r') version.pop_back();
    }

    std::function<Vector(const Vector&)> predict;
    std::optional<data::NormalizationMap> map;
    if (version == "tricept-mlp v1") {
        mlp::LoadedModel lm = mlp::load(model_path);
        map = lm.map;
        predict = [model = std::move(lm.model)](const Vector& x) { return forward(model, x); };
    } else if (version == "tricept-rbf v1") {
        rbf::LoadedModel lr = rbf::load(model_path);
        map = lr.map;
        predict = [model = std::move(lr.model)](const Vector& x) { return forward(model, x); };
    } else {
        throw ParseError("unrecognized model file " + model_path, 1);
    }

    Vector x = {pose.theta, pose.psi, pose.c};
    const std::array<const char*, 3> names = {"theta", "psi", "c"};
    if (map) {
        for (std::size_t i = 0; i < 3; ++i) {
            if (x[i] < map->min[i] || x[i] > map->max[i])
                warn << "warning: " << names[i] << " = " << fmt17(x[i])
                     << " lies outside the training range [" << fmt17(map->min[i]) << ", "
                     << fmt17(map->max[i]) << "]\n";
            x[i] = (x[i] - map->min[i]) / (map->max[i] - map->min[i]);
        }
    } else if (!cfg.domain.contains(pose)) {
        warn << "warning: pose lies outside the configured pose domain\n";
    }

    Vector y = predict(x);
    if (y.size() != 3) throw ShapeError("model does not predict three leg lengths");
    if (map)
        for (std::size_t j = 0; j < 3; ++j)
            y[j] = y[j] * (map->max[3 + j] - map->min[3 + j]) + map->min[3 + j];

    const LegLengths exact = inverse_kinematics(cfg.geometry, pose);
    double max_err = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        const std::string n = "q" + std::to_string(j + 1);
        out << n << "_predicted " << fmt17(y[j]) << '\n';
        out << n << "_exact " << fmt17(exact[j]) << '\n';
        max_err = std::max(max_err, std::abs(y[j] - exact[j]));
    }
    out << "max_abs_error " << fmt17(max_err) << '\n';
    return 0;
}

} // namespace tricept::pipeline
