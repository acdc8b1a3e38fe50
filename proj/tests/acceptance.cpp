// Release gate: every product requirement is checked here at its stated
// threshold, one line of output per criterion. Run with no arguments for
// the full gate or with criterion numbers to run a subset.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "tricept/config.hpp"
#include "tricept/dataset.hpp"
#include "tricept/evaluation.hpp"
#include "tricept/kinematics.hpp"
#include "tricept/mlp.hpp"
#include "tricept/pipeline.hpp"
#include "tricept/rbf.hpp"
#include "tricept/rng.hpp"

namespace fs = std::filesystem;
using namespace tricept;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------
// Shared corpus and trained surrogates, built once per process.

struct Corpus {
    data::Dataset real;
    data::Dataset normalized;
    data::NormalizationMap map;
    data::Dataset norm_train, norm_val;
    data::Dataset real_train, real_val;
};

const config::RunConfig& cfg() {
    static const config::RunConfig c;
    return c;
}

const Corpus& corpus() {
    static const Corpus c = [] {
        Corpus out;
        out.real = data::generate(cfg().geometry, cfg().domain, cfg().scheme, cfg().n_samples,
                                  cfg().sampling_seed);
        auto [norm, map] = data::normalize(out.real);
        out.normalized = std::move(norm);
        out.map = map;
        const data::SplitIndices idx =
            data::split(out.real, cfg().train_ratio, cfg().validation_ratio, cfg().test_ratio,
                        cfg().split_seed);
        out.norm_train = data::subset(out.normalized, idx.train);
        out.norm_val = data::subset(out.normalized, idx.validation);
        out.real_train = data::subset(out.real, idx.train);
        out.real_val = data::subset(out.real, idx.validation);
        return out;
    }();
    return c;
}

Vector domain_scales() {
    const PoseDomain& d = cfg().domain;
    auto mag = [](double lo, double hi) {
        const double m = std::max(std::abs(lo), std::abs(hi));
        return m > 0.0 ? m : 1.0;
    };
    return {mag(d.theta_min, d.theta_max), mag(d.psi_min, d.psi_max), mag(d.c_min, d.c_max)};
}

struct TimedMlp {
    mlp::TrainResult result;
    double seconds;
};

struct TimedRbf {
    rbf::RbfTrainResult result;
    double seconds;
};

const TimedMlp& mlp_normalized() {
    static const TimedMlp t = [] {
        const Corpus& c = corpus();
        mlp::MlpModel model = mlp::init({3, 5, 3}, cfg().mlp_hidden_activation, cfg().mlp_seed);
        const auto t0 = std::chrono::steady_clock::now();
        TimedMlp out{mlp::train_lm(model, c.norm_train, c.norm_val, cfg().mlp_options), 0.0};
        out.seconds = seconds_since(t0);
        return out;
    }();
    return t;
}

const TimedMlp& mlp_real() {
    static const TimedMlp t = [] {
        const Corpus& c = corpus();
        mlp::MlpModel model =
            mlp::init_scaled({3, 5, 3}, cfg().mlp_hidden_activation, cfg().mlp_seed,
                             domain_scales());
        const auto t0 = std::chrono::steady_clock::now();
        TimedMlp out{mlp::train_lm(model, c.real_train, c.real_val, cfg().mlp_options), 0.0};
        out.seconds = seconds_since(t0);
        return out;
    }();
    return t;
}

const TimedRbf& rbf_normalized() {
    static const TimedRbf t = [] {
        rbf::RbfOptions opts;
        opts.max_neurons = cfg().rbf_max_neurons;
        opts.goal_mse = cfg().rbf_goal_mse;
        opts.spread = cfg().rbf_spread_normalized;
        opts.include_bias = cfg().rbf_include_bias;
        const auto t0 = std::chrono::steady_clock::now();
        TimedRbf out{rbf::train_incremental(corpus().normalized, opts), 0.0};
        out.seconds = seconds_since(t0);
        return out;
    }();
    return t;
}

const TimedRbf& rbf_real() {
    static const TimedRbf t = [] {
        rbf::RbfOptions opts;
        opts.max_neurons = cfg().rbf_max_neurons;
        opts.goal_mse = cfg().rbf_goal_mse;
        opts.spread = cfg().rbf_spread_real;
        opts.include_bias = cfg().rbf_include_bias;
        const auto t0 = std::chrono::steady_clock::now();
        TimedRbf out{rbf::train_incremental(corpus().real, opts), 0.0};
        out.seconds = seconds_since(t0);
        return out;
    }();
    return t;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------------
// Criteria. Each returns pass/fail and appends detail lines.

bool criterion1(std::vector<std::string>& notes) {
    const TimedMlp& m = mlp_normalized();
    const double m_mse = m.result.history.back().mse_train;
    const std::size_t m_epochs = m.result.history.back().epoch;
    const TimedRbf& r = rbf_normalized();
    const double r_mse = r.result.history.back().mse;
    const std::size_t r_neurons = r.result.model.neuron_count();

    const bool mlp_ok = m_mse <= 1e-3 && m_epochs <= 222 && m.seconds <= 120.0;
    const bool rbf_ok = r_mse <= 1e-3 && r_neurons <= 20 && r.seconds <= 120.0;
    notes.push_back("mlp: train mse " + fmt(m_mse) + " after " + std::to_string(m_epochs) +
                    " epochs in " + fmt(m.seconds) + " s (goal 1e-3)");
    notes.push_back("rbf: train mse " + fmt(r_mse) + " with " + std::to_string(r_neurons) +
                    " neurons in " + fmt(r.seconds) + " s (goal 1e-3)");
    notes.push_back(std::string("stretch 1e-6: mlp ") + (m_mse <= 1e-6 ? "met" : "not met") +
                    ", rbf " + (r_mse <= 1e-6 ? "met" : "not met") + " (informational)");
    return mlp_ok && rbf_ok;
}

bool criterion2(std::vector<std::string>& notes) {
    const TimedMlp& m = mlp_real();
    const double m_mse = m.result.history.back().mse_train;
    const TimedRbf& r = rbf_real();
    const double r_mse = r.result.history.back().mse;

    const bool mlp_ok = m_mse <= 1e-3 && m.seconds <= 120.0;
    const bool rbf_ok = r_mse <= 1e-3 && r.seconds <= 120.0;
    notes.push_back("mlp: train mse " + fmt(m_mse) + " mm^2 in " + fmt(m.seconds) +
                    " s (goal 1e-3)");
    notes.push_back("rbf: train mse " + fmt(r_mse) + " mm^2 with " +
                    std::to_string(r.result.model.neuron_count()) + " neurons in " +
                    fmt(r.seconds) + " s (goal 1e-3)");
    notes.push_back(std::string("stretch 1e-4: mlp ") + (m_mse <= 1e-4 ? "met" : "not met") +
                    ", rbf " + (r_mse <= 1e-4 ? "met" : "not met") + " (informational)");
    return mlp_ok && rbf_ok;
}

bool criterion3(std::vector<std::string>& notes) {
    const Corpus& c = corpus();
    const mlp::MlpModel mlp_model = mlp_normalized().result.model;
    const rbf::RbfModel rbf_model = rbf_normalized().result.model;

    eval::Predictor mlp_pred = [&mlp_model](const Matrix& in) {
        return mlp::forward_batch(mlp_model, in);
    };
    eval::Predictor rbf_pred = [&rbf_model](const Matrix& in) {
        return rbf::forward_batch(rbf_model, in);
    };
    const double f_mlp = eval::fraction_below(eval::collect_errors(mlp_pred, c.normalized), 1e-4);
    const double f_rbf = eval::fraction_below(eval::collect_errors(rbf_pred, c.normalized), 1e-4);

    notes.push_back("mlp: " + fmt(100.0 * f_mlp) + "% of pooled errors below 1e-4 (need > 90%)");
    notes.push_back("rbf: " + fmt(100.0 * f_rbf) + "% of pooled errors below 1e-4 (need > 90%)");
    return f_mlp > 0.90 && f_rbf > 0.90;
}

bool criterion4(std::vector<std::string>& notes) {
    const auto& mh = mlp_normalized().result.history;
    bool early = false;
    std::size_t cross = 0;
    for (const auto& rec : mh)
        if (rec.epoch <= 15 && rec.mse_train < 1e-3) {
            early = true;
            cross = rec.epoch;
            break;
        }
    notes.push_back(early ? "mlp crosses 1e-3 at epoch " + std::to_string(cross) +
                                " (budget 15)"
                          : "mlp never reaches 1e-3 inside 15 epochs");

    const auto& rh = rbf_normalized().result.history;
    bool monotone = rh.size() == 20;
    for (std::size_t i = 1; i < rh.size(); ++i)
        monotone = monotone && rh[i].mse <= rh[i - 1].mse * (1.0 + 1e-12) + 1e-18;
    notes.push_back("rbf growth records " + std::to_string(rh.size()) + " steps, " +
                    (monotone ? "never increasing" : "with an increase"));
    return early && monotone;
}

bool criterion5(std::vector<std::string>& notes) {
    const auto t0 = std::chrono::steady_clock::now();
    const TriceptGeometry& geom = cfg().geometry;
    const PoseDomain& dom = cfg().domain;
    const double sqrt3 = std::sqrt(3.0);
    Rng rng(500);

    double worst_closure = 0.0, worst_roundtrip = 0.0, worst_mirror = 0.0, worst_gap = 0.0;
    for (int it = 0; it < 1000; ++it) {
        const Pose pose(rng.uniform(dom.theta_min, dom.theta_max),
                        rng.uniform(dom.psi_min, dom.psi_max),
                        rng.uniform(dom.c_min, dom.c_max));
        const LegLengths q = inverse_kinematics(geom, pose);

        const auto res = closure_residual(geom, pose, q);
        for (double v : res) worst_closure = std::max(worst_closure, std::abs(v));

        const Pose back = forward_kinematics(geom, q, dom.centroid());
        worst_roundtrip = std::max({worst_roundtrip, std::abs(back.theta - pose.theta),
                                    std::abs(back.psi - pose.psi), std::abs(back.c - pose.c)});

        const LegLengths mirror = inverse_kinematics(geom, Pose(pose.theta, -pose.psi, pose.c));
        const double rel = std::max({std::abs(mirror.q1 - q.q1) / q.q1,
                                     std::abs(mirror.q2 - q.q3) / q.q3,
                                     std::abs(mirror.q3 - q.q2) / q.q2});
        worst_mirror = std::max(worst_mirror, rel);

        const LegLengths printed = expanded_leg_lengths(geom, pose);
        const auto disc = expanded_discrepancy(geom, pose);
        const double st = std::sin(pose.theta), ct = std::cos(pose.theta);
        const double sp = std::sin(pose.psi);
        const double ac2 = 2.0 * geom.a * pose.c;
        const double want[3] = {ac2 / sqrt3 * st, -ac2 * (st / sqrt3 + ct * sp),
                                -ac2 * (st / sqrt3 - ct * sp)};
        for (std::size_t i = 0; i < 3; ++i) {
            const double gap = printed[i] * printed[i] - q[i] * q[i];
            const double scale = std::max({std::abs(gap), std::abs(want[i]), 1e3});
            worst_gap = std::max({worst_gap, std::abs(disc[i] - want[i]) / scale,
                                  std::abs(gap - disc[i]) / scale});
        }
    }
    const double elapsed = seconds_since(t0);

    notes.push_back("closure residual max " + fmt(worst_closure) + " mm (limit 1e-9)");
    notes.push_back("round trip max " + fmt(worst_roundtrip) + " (limit 1e-8)");
    notes.push_back("mirror swap max relative " + fmt(worst_mirror) + " (limit 1e-10)");
    notes.push_back("printed expansion gap max relative " + fmt(worst_gap) + " (limit 1e-9)");
    notes.push_back("1000 poses in " + fmt(elapsed) + " s (limit 5 s)");
    return worst_closure <= 1e-9 && worst_roundtrip <= 1e-8 && worst_mirror <= 1e-10 &&
           worst_gap <= 1e-9 && elapsed <= 5.0;
}

bool criterion6(std::vector<std::string>& notes) {
    double worst = 0.0;
    for (int pair = 0; pair < 50; ++pair) {
        const std::size_t hidden = 1 + pair % 8;
        const std::size_t batch = 1 + pair % 5;
        const mlp::Activation act =
            pair % 2 == 0 ? mlp::Activation::tansig : mlp::Activation::logsig;
        mlp::MlpModel model = mlp::init({3, hidden, 3}, act, 600 + pair);

        Rng rng(6000 + pair);
        data::Dataset ds{Matrix(batch, 3), Matrix(batch, 3)};
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                ds.inputs(i, j) = rng.uniform(-1.0, 1.0);
                ds.targets(i, j) = rng.uniform(-1.0, 1.0);
            }

        const mlp::JacobianResult jr = mlp::jacobian(model, ds.inputs, ds.targets);

        auto f = [&](const Vector& params) {
            mlp::MlpModel m = model;
            std::size_t k = 0;
            for (std::size_t l = 0; l < m.weights.size(); ++l) {
                for (std::size_t i = 0; i < m.weights[l].rows(); ++i)
                    for (std::size_t j = 0; j < m.weights[l].cols(); ++j)
                        m.weights[l](i, j) = params[k++];
                for (double& b : m.biases[l]) b = params[k++];
            }
            const Matrix out = mlp::forward_batch(m, ds.inputs);
            Vector e;
            for (std::size_t s = 0; s < batch; ++s)
                for (std::size_t j = 0; j < 3; ++j) e.push_back(ds.targets(s, j) - out(s, j));
            return e;
        };
        Vector params;
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            for (double v : model.weights[l].data()) params.push_back(v);
            for (double b : model.biases[l]) params.push_back(b);
        }
        const Matrix fd = finite_difference_jacobian(f, params, 1e-6);

        double max_abs = 0.0, max_diff = 0.0;
        for (std::size_t i = 0; i < fd.rows(); ++i)
            for (std::size_t j = 0; j < fd.cols(); ++j) {
                max_abs = std::max(max_abs, std::abs(jr.jac(i, j)));
                max_diff = std::max(max_diff, std::abs(jr.jac(i, j) - fd(i, j)));
            }
        worst = std::max(worst, max_diff / std::max(max_abs, 1e-12));
    }
    notes.push_back("50 model/batch pairs, worst relative gap " + fmt(worst) + " (limit 1e-5)");
    return worst <= 1e-5;
}

bool criterion7(std::vector<std::string>& notes) {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        Rng rng(700 + trial);
        data::Dataset ds{Matrix(20, 3), Matrix(20, 3)};
        std::size_t placed = 0;
        while (placed < 20) {
            double p[3] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                           rng.uniform(-1.0, 1.0)};
            bool ok = true;
            for (std::size_t i = 0; i < placed && ok; ++i) {
                double d2 = 0.0;
                for (std::size_t k = 0; k < 3; ++k) {
                    const double d = ds.inputs(i, k) - p[k];
                    d2 += d * d;
                }
                ok = d2 >= 0.04;
            }
            if (!ok) continue;
            for (std::size_t k = 0; k < 3; ++k) {
                ds.inputs(placed, k) = p[k];
                ds.targets(placed, k) = rng.uniform(-1.0, 1.0);
            }
            ++placed;
        }

        rbf::RbfOptions opts;
        opts.max_neurons = 20;
        opts.goal_mse = 0.0;
        opts.spread = 0.5;
        opts.include_bias = false;
        const rbf::RbfTrainResult res = rbf::train_incremental(ds, opts);
        if (res.model.neuron_count() != 20) {
            notes.push_back("trial " + std::to_string(trial) + " stopped at " +
                            std::to_string(res.model.neuron_count()) + " neurons");
            return false;
        }
        worst = std::max(worst, res.history.back().mse);
    }
    notes.push_back("5 corpora of 20 points, worst final mse " + fmt(worst) + " (limit 1e-12)");
    return worst <= 1e-12;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(TRICEPT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool criterion8(std::vector<std::string>& notes) {
    const fs::path root = "/tmp/tricept_acceptance_repro";
    fs::remove_all(root);

    for (const char* run : {"one", "two"}) {
        const fs::path dir = root / run;
        const std::string data = (dir / "data").string();
        const std::string ev = (dir / "eval").string();
        if (run_cli("gen-data --out " + data) != 0 ||
            run_cli("train-mlp --data " + data + " --out " + data) != 0 ||
            run_cli("train-rbf --data " + data + " --out " + data) != 0) {
            notes.push_back(std::string(run) + ": a pipeline step failed outright");
            return false;
        }
        // eval and report exit 1 when a goal verdict fails; only real
        // errors (2..4) disqualify the run.
        const int ev_rc = run_cli("eval --data " + data + " --models " + data + " --out " + ev);
        const int rep_rc =
            run_cli("report --eval-dir " + ev + " --out " + (dir / "report").string());
        if (ev_rc > 1 || ev_rc < 0 || rep_rc > 1 || rep_rc < 0) {
            notes.push_back(std::string(run) + ": eval/report failed outright");
            return false;
        }
    }

    const char* files[] = {"data/dataset.csv",
                           "data/dataset_normalized.csv",
                           "data/normmap.txt",
                           "data/stats.txt",
                           "data/mlp_normalized.model",
                           "data/mlp_normalized_curve.csv",
                           "data/mlp_real.model",
                           "data/mlp_real_curve.csv",
                           "data/rbf_normalized.model",
                           "data/rbf_normalized_curve.csv",
                           "data/rbf_real.model",
                           "data/rbf_real_curve.csv",
                           "eval/eval_mlp_normalized.txt",
                           "eval/eval_rbf_normalized.txt",
                           "eval/eval_mlp_real.txt",
                           "eval/eval_rbf_real.txt",
                           "eval/hist_mlp_normalized.csv",
                           "eval/hist_rbf_normalized.csv",
                           "eval/hist_mlp_real.csv",
                           "eval/hist_rbf_real.csv",
                           "eval/report.txt",
                           "report/report.txt"};
    std::size_t mismatches = 0;
    for (const char* f : files) {
        const std::string a = slurp(root / "one" / f);
        const std::string b = slurp(root / "two" / f);
        if (a.empty() || a != b) {
            notes.push_back(std::string("differs or missing: ") + f);
            ++mismatches;
        }
    }
    notes.push_back(std::to_string(sizeof(files) / sizeof(files[0]) - mismatches) + " of " +
                    std::to_string(sizeof(files) / sizeof(files[0])) +
                    " artifacts byte identical");
    fs::remove_all(root);
    return mismatches == 0;
}

struct Criterion {
    int number;
    const char* title;
    bool (*fn)(std::vector<std::string>&);
};

const Criterion kCriteria[] = {
    {1, "normalized surrogates reach mse 1e-3 within their budgets", criterion1},
    {2, "raw unit surrogates reach mse 1e-3 mm^2", criterion2},
    {3, "over 90% of pooled normalized errors are below 1e-4", criterion3},
    {4, "mlp converges inside 15 epochs and rbf growth never backtracks", criterion4},
    {5, "kinematic identities hold over 1000 random poses", criterion5},
    {6, "the analytic jacobian matches central differences", criterion6},
    {7, "20 distinct points are interpolated exactly by 20 neurons", criterion7},
    {8, "two pipeline runs are byte identical", criterion8},
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (const Criterion& c : kCriteria) selected.push_back(c.number);

    bool all_pass = true;
    for (int number : selected) {
        const Criterion* cr = nullptr;
        for (const Criterion& c : kCriteria)
            if (c.number == number) cr = &c;
        if (!cr) {
            std::cerr << "unknown criterion " << number << "\n";
            return 2;
        }

        std::vector<std::string> notes;
        bool pass = false;
        try {
            pass = cr->fn(notes);
        } catch (const std::exception& e) {
            notes.push_back(std::string("exception: ") + e.what());
        }
        std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << cr->number << ": "
                  << cr->title << "\n";
        for (const std::string& n : notes) std::cout << "       " << n << "\n";
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
