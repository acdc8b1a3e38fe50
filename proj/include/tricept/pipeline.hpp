#pragma once

#include <iosfwd>
#include <string>

#include "tricept/config.hpp"
#include "tricept/kinematics.hpp"

namespace tricept::pipeline {

// Which representation a surrogate is trained and evaluated in: min-max
// scaled columns, or the raw angles / millimeters.
enum class Space { normalized, real };

Space parse_space(const std::string& name);
std::string space_name(Space s);

// Each step returns a process exit code (0 = success; run_eval and
// run_report return 1 when a goal check fails). Progress goes to `log`;
// every artifact is written under the given directory, which is created
// on demand. Errors surface as exceptions for the caller to map.

// Writes dataset.csv, dataset_normalized.csv, normmap.txt, stats.txt.
int run_gen_data(const config::RunConfig& cfg, const std::string& out_dir, std::ostream& log);

// Trains on the train partition with validation-based early stopping and
// writes mlp_<space>.model plus mlp_<space>_curve.csv.
int run_train_mlp(const config::RunConfig& cfg, const std::string& data_dir,
                  const std::string& out_dir, Space space, std::ostream& log);

// Grows on the full corpus and writes rbf_<space>.model plus
// rbf_<space>_curve.csv.
int run_train_rbf(const config::RunConfig& cfg, const std::string& data_dir,
                  const std::string& out_dir, Space space, std::ostream& log);

// Scores all four models over the full corpus; writes one eval_<label>.txt
// and hist_<label>.csv per model plus the combined report.txt.
int run_eval(const config::RunConfig& cfg, const std::string& data_dir,
             const std::string& models_dir, const std::string& out_dir, std::ostream& log);

// Rebuilds report.txt from the eval_<label>.txt files alone.
int run_report(const std::string& eval_dir, const std::string& out_dir, std::ostream& log);

// Runs one pose through a saved model (either kind; normalization is
// applied when the file carries its map) and prints the predicted leg
// lengths next to the exact inverse kinematics.
int run_predict(const config::RunConfig& cfg, const std::string& model_path, const Pose& pose,
                std::ostream& out, std::ostream& warn);

} // namespace tricept::pipeline
