#include "tricept/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tricept::eval {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Vector errors_impl(const Predictor& predict, const data::Dataset& ds,
                   const data::NormalizationMap* map) {
    if (ds.n() == 0) throw InvalidArgumentError("evaluate: empty dataset");
    const Matrix pred = predict(ds.inputs);
    if (pred.rows() != ds.targets.rows() || pred.cols() != ds.targets.cols())
        throw ShapeError("evaluate: prediction shape does not match targets");

    Vector errors;
    errors.reserve(pred.rows() * pred.cols());
    for (std::size_t i = 0; i < pred.rows(); ++i)
        for (std::size_t j = 0; j < pred.cols(); ++j) {
            double e = ds.targets(i, j) - pred(i, j);
            if (map) e *= map->max[3 + j] - map->min[3 + j];
            errors.push_back(e);
        }
    return errors;
}

// The flat error vector is sample-major with 3 outputs per sample.
EvalResult reduce(const Vector& errors) {
    EvalResult r;
    r.n = errors.size();
    std::array<double, 3> ss{};
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const double e = errors[i];
        ss[i % 3] += e * e;
        r.max_abs_error = std::max(r.max_abs_error, std::abs(e));
    }
    const auto rows = static_cast<double>(errors.size() / 3);
    for (std::size_t j = 0; j < 3; ++j) r.per_output_mse[j] = ss[j] / rows;
    r.mse = (ss[0] + ss[1] + ss[2]) / static_cast<double>(errors.size());
    return r;
}

} // namespace

EvalResult evaluate(const Predictor& predict, const data::Dataset& ds) {
    return reduce(errors_impl(predict, ds, nullptr));
}

EvalResult evaluate(const Predictor& predict, const data::Dataset& ds,
                    const data::NormalizationMap& map) {
    return reduce(errors_impl(predict, ds, &map));
}

Vector collect_errors(const Predictor& predict, const data::Dataset& ds) {
    return errors_impl(predict, ds, nullptr);
}

Vector collect_errors(const Predictor& predict, const data::Dataset& ds,
                      const data::NormalizationMap& map) {
    return errors_impl(predict, ds, &map);
}

double fraction_below(const Vector& values, double threshold) {
    if (values.empty()) throw InvalidArgumentError("fraction_below: no values");
    std::size_t hits = 0;
    for (double v : values)
        if (std::abs(v) < threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(values.size());
}

Histogram histogram(const Vector& values, std::size_t bins) {
    if (values.empty()) throw InvalidArgumentError("histogram: no values");
    if (bins < 1) throw InvalidArgumentError("histogram: need at least one bin");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgumentError("histogram: non-finite value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }

    Histogram h;
    h.edges.resize(bins + 1);
    h.counts.assign(bins, 0);
    for (std::size_t i = 0; i <= bins; ++i)
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    h.edges.back() = hi;

    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        if (b >= bins) b = bins - 1; // the maximum lands in the last bin
        ++h.counts[b];
    }
    return h;
}

void export_histogram(const Histogram& h, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("export_histogram: cannot open " + path + " for writing");
    f << "bin_low,bin_high,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        f << fmt17(h.edges[i]) << ',' << fmt17(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
    if (!f) throw IoError("export_histogram: write failed for " + path);
}

void export_training_curve(const std::vector<mlp::TrainRecord>& history,
                           const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("export_training_curve: cannot open " + path + " for writing");
    const bool has_val = std::any_of(history.begin(), history.end(),
                                     [](const mlp::TrainRecord& r) {
                                         return r.mse_validation.has_value();
                                     });
    f << (has_val ? "epoch,mse_train,mse_validation\n" : "epoch,mse_train\n");
    for (const auto& r : history) {
        f << r.epoch << ',' << fmt17(r.mse_train);
        if (has_val) {
            f << ',';
            if (r.mse_validation) f << fmt17(*r.mse_validation);
        }
        f << '\n';
    }
    if (!f) throw IoError("export_training_curve: write failed for " + path);
}

void export_training_curve(const std::vector<rbf::GrowthRecord>& history,
                           const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("export_training_curve: cannot open " + path + " for writing");
    f << "neurons,mse\n";
    for (const auto& r : history) f << r.neurons << ',' << fmt17(r.mse) << '\n';
    if (!f) throw IoError("export_training_curve: write failed for " + path);
}

CompareReport compare_report(const std::vector<CompareEntry>& entries) {
    CompareReport rep;
    rep.entries = entries;

    std::ostringstream out;
    out << "model                     mse           max|error|    goal          verdict\n";
    for (const auto& e : entries) {
        const bool pass = e.result.mse <= e.goal_mse;
        rep.all_pass = rep.all_pass && pass;
        char line[160];
        std::snprintf(line, sizeof line, "%-24s  %-12.5g  %-12.5g  %-12.5g  %s\n", e.label.c_str(),
                      e.result.mse, e.result.max_abs_error, e.goal_mse, pass ? "pass" : "FAIL");
        out << line;
    }
    out << (rep.all_pass ? "overall: pass\n" : "overall: FAIL\n");
    rep.text = out.str();
    return rep;
}

} // namespace tricept::eval
