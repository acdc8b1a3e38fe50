#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "tricept/pipeline.hpp"

using tricept::config::RunConfig;
namespace pipeline = tricept::pipeline;

namespace {

int dispatch(const CLI::App& app, const RunConfig& cfg, const std::string& data_dir,
             const std::string& models_dir, const std::string& out_dir,
             const std::string& eval_dir, const std::string& space,
             const std::string& model_path, double theta, double psi, double c) {
    if (app.got_subcommand("gen-data")) return pipeline::run_gen_data(cfg, out_dir, std::cout);

    if (app.got_subcommand("train-mlp") || app.got_subcommand("train-rbf")) {
        const bool is_mlp = app.got_subcommand("train-mlp");
        auto run = [&](pipeline::Space s) {
            return is_mlp ? pipeline::run_train_mlp(cfg, data_dir, out_dir, s, std::cout)
                          : pipeline::run_train_rbf(cfg, data_dir, out_dir, s, std::cout);
        };
        if (space == "both") {
            const int rc = run(pipeline::Space::normalized);
            if (rc != 0) return rc;
            return run(pipeline::Space::real);
        }
        return run(pipeline::parse_space(space));
    }

    if (app.got_subcommand("eval"))
        return pipeline::run_eval(cfg, data_dir, models_dir, out_dir, std::cout);

    if (app.got_subcommand("report")) return pipeline::run_report(eval_dir, out_dir, std::cout);

    // predict
    return pipeline::run_predict(cfg, model_path, tricept::Pose(theta, psi, c), std::cout,
                                 std::cerr);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tricept parallel manipulator: exact inverse kinematics and neural surrogates"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "INI configuration file (defaults are built in)");
    std::uint64_t seed_value = 0;
    CLI::Option* seed_opt =
        app.add_option("--seed", seed_value, "master seed overriding every stage seed");

    std::string data_dir = ".";
    std::string models_dir = ".";
    std::string out_dir = ".";
    std::string eval_dir = ".";
    std::string space = "both";
    std::string model_path;
    double theta = 0.0, psi = 0.0, c = 0.0;

    // fallthrough lets --config / --seed appear after the subcommand name too
    CLI::App* gen = app.add_subcommand("gen-data", "sample poses and write the datasets");
    gen->fallthrough();
    gen->add_option("--out", out_dir, "output directory");

    for (const char* name : {"train-mlp", "train-rbf"}) {
        CLI::App* sub = app.add_subcommand(
            name, std::string("train the ") +
                      (name == std::string("train-mlp") ? "feedforward network"
                                                        : "radial basis network"));
        sub->fallthrough();
        sub->add_option("--data", data_dir, "directory holding the datasets");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--space", space, "normalized | real | both")
            ->check(CLI::IsMember({"normalized", "real", "both"}));
    }

    CLI::App* ev = app.add_subcommand("eval", "score every trained model and write the report");
    ev->fallthrough();
    ev->add_option("--data", data_dir, "directory holding the datasets");
    ev->add_option("--models", models_dir, "directory holding the trained models");
    ev->add_option("--out", out_dir, "output directory");

    CLI::App* rep = app.add_subcommand("report", "rebuild the report from saved evaluations");
    rep->fallthrough();
    rep->add_option("--eval-dir", eval_dir, "directory holding the eval_*.txt files");
    rep->add_option("--out", out_dir, "output directory");

    CLI::App* pred = app.add_subcommand("predict", "run one pose through a saved model");
    pred->fallthrough();
    pred->add_option("--model", model_path, "model file")->required();
    pred->add_option("--theta", theta, "pitch angle in radians")->required();
    pred->add_option("--psi", psi, "yaw angle in radians")->required();
    pred->add_option("--c", c, "extension in millimeters")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = tricept::config::load_config(config_path);
        if (seed_opt->count() > 0) cfg.override_seeds(seed_value);
        cfg.validate();
        if (app.got_subcommand("predict") && !(std::isfinite(theta) && std::isfinite(psi) &&
                                               std::isfinite(c) && c > 0.0)) {
            std::cerr << "error: pose must be finite with c > 0\n";
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        return dispatch(app, cfg, data_dir, models_dir, out_dir, eval_dir, space, model_path,
                        theta, psi, c);
    } catch (const tricept::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const tricept::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
