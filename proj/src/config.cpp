#include "tricept/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

namespace tricept::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& tok, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
        throw ParseError("malformed number '" + tok + "'", line_no);
    return v;
}

std::uint64_t parse_u64(const std::string& tok, std::size_t line_no) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0' || tok[0] == '-')
        throw ParseError("malformed unsigned integer '" + tok + "'", line_no);
    return v;
}

std::size_t parse_size(const std::string& tok, std::size_t line_no) {
    return static_cast<std::size_t>(parse_u64(tok, line_no));
}

bool parse_bool(const std::string& tok, std::size_t line_no) {
    if (tok == "1" || tok == "true") return true;
    if (tok == "0" || tok == "false") return false;
    throw ParseError("expected a boolean (0/1/true/false), got '" + tok + "'", line_no);
}

std::vector<std::size_t> parse_size_list(const std::string& tok, std::size_t line_no) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= tok.size()) {
        const auto comma = tok.find(',', pos);
        const std::string piece =
            trim(tok.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (piece.empty()) throw ParseError("empty entry in list '" + tok + "'", line_no);
        const std::size_t v = parse_size(piece, line_no);
        if (v == 0) throw ParseError("layer sizes must be positive", line_no);
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace

void RunConfig::validate() const {
    if (!(std::isfinite(geometry.a) && std::isfinite(geometry.b) && std::isfinite(geometry.d)))
        throw InvalidArgumentError("geometry values must be finite");
    if (geometry.a < 0.0 || geometry.b < 0.0 || geometry.d < 0.0)
        throw InvalidArgumentError("geometry values must be non-negative");
    if (geometry.a == 0.0 && geometry.b == 0.0)
        throw InvalidArgumentError("platform and base cannot both be degenerate");

    const bool domain_finite =
        std::isfinite(domain.theta_min) && std::isfinite(domain.theta_max) &&
        std::isfinite(domain.psi_min) && std::isfinite(domain.psi_max) &&
        std::isfinite(domain.c_min) && std::isfinite(domain.c_max);
    if (!domain_finite) throw InvalidArgumentError("domain bounds must be finite");
    if (domain.theta_min > domain.theta_max || domain.psi_min > domain.psi_max ||
        domain.c_min > domain.c_max)
        throw InvalidArgumentError("domain bounds must be ordered");
    if (!(domain.c_min > 0.0)) throw InvalidArgumentError("c_min must be positive");

    if (n_samples < 1) throw InvalidArgumentError("n must be >= 1");

    if (train_ratio < 0.0 || validation_ratio < 0.0 || test_ratio < 0.0)
        throw InvalidArgumentError("split ratios must be non-negative");
    if (std::abs(train_ratio + validation_ratio + test_ratio - 1.0) > 1e-9)
        throw InvalidArgumentError("split ratios must sum to 1");
    if (!(train_ratio > 0.0)) throw InvalidArgumentError("train ratio must be positive");

    for (std::size_t h : mlp_hidden)
        if (h < 1) throw InvalidArgumentError("hidden layer sizes must be positive");
    mlp_options.validate();

    if (!(std::isfinite(rbf_spread_normalized) && rbf_spread_normalized > 0.0))
        throw InvalidArgumentError("spread_normalized must be finite and positive");
    if (!(std::isfinite(rbf_spread_real) && rbf_spread_real > 0.0))
        throw InvalidArgumentError("spread_real must be finite and positive");
    if (!(rbf_goal_mse >= 0.0)) throw InvalidArgumentError("rbf goal_mse must be >= 0");

    if (!(report_goal_normalized >= 0.0 && report_goal_real >= 0.0))
        throw InvalidArgumentError("report goals must be >= 0");
    if (histogram_bins < 1) throw InvalidArgumentError("histogram_bins must be >= 1");
}

void RunConfig::override_seeds(std::uint64_t seed) {
    sampling_seed = seed;
    split_seed = seed + 1;
    mlp_seed = seed + 2;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("load_config: cannot open " + path);

    RunConfig cfg;
    std::string line, section;
    std::size_t line_no = 0;

    while (std::getline(f, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;

        if (t.front() == '[') {
            if (t.back() != ']') throw ParseError("unterminated section header", line_no);
            section = trim(t.substr(1, t.size() - 2));
            if (section != "geometry" && section != "domain" && section != "sampling" &&
                section != "split" && section != "mlp" && section != "rbf" &&
                section != "report")
                throw ParseError("unknown section '" + section + "'", line_no);
            continue;
        }

        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key.empty() || val.empty()) throw ParseError("expected 'key = value'", line_no);
        if (section.empty()) throw ParseError("key outside any section", line_no);

        auto unknown = [&]() -> ParseError {
            return ParseError("unknown key '" + key + "' in section [" + section + "]", line_no);
        };

        if (section == "geometry") {
            if (key == "a") cfg.geometry.a = parse_double(val, line_no);
            else if (key == "b") cfg.geometry.b = parse_double(val, line_no);
            else if (key == "d") cfg.geometry.d = parse_double(val, line_no);
            else throw unknown();
        } else if (section == "domain") {
            if (key == "theta_min") cfg.domain.theta_min = parse_double(val, line_no);
            else if (key == "theta_max") cfg.domain.theta_max = parse_double(val, line_no);
            else if (key == "psi_min") cfg.domain.psi_min = parse_double(val, line_no);
            else if (key == "psi_max") cfg.domain.psi_max = parse_double(val, line_no);
            else if (key == "c_min") cfg.domain.c_min = parse_double(val, line_no);
            else if (key == "c_max") cfg.domain.c_max = parse_double(val, line_no);
            else throw unknown();
        } else if (section == "sampling") {
            if (key == "scheme") {
                try {
                    cfg.scheme = data::parse_scheme(val);
                } catch (const InvalidArgumentError& e) {
                    throw ParseError(e.what(), line_no);
                }
            } else if (key == "n") cfg.n_samples = parse_size(val, line_no);
            else if (key == "seed") cfg.sampling_seed = parse_u64(val, line_no);
            else throw unknown();
        } else if (section == "split") {
            if (key == "train") cfg.train_ratio = parse_double(val, line_no);
            else if (key == "validation") cfg.validation_ratio = parse_double(val, line_no);
            else if (key == "test") cfg.test_ratio = parse_double(val, line_no);
            else if (key == "seed") cfg.split_seed = parse_u64(val, line_no);
            else throw unknown();
        } else if (section == "mlp") {
            if (key == "hidden") cfg.mlp_hidden = parse_size_list(val, line_no);
            else if (key == "hidden_activation" || key == "output_activation") {
                mlp::Activation act;
                try {
                    act = mlp::parse_activation(val);
                } catch (const InvalidArgumentError& e) {
                    throw ParseError(e.what(), line_no);
                }
                (key == "hidden_activation" ? cfg.mlp_hidden_activation
                                            : cfg.mlp_output_activation) = act;
            } else if (key == "max_epochs") cfg.mlp_options.max_epochs = parse_size(val, line_no);
            else if (key == "goal_mse") cfg.mlp_options.goal_mse = parse_double(val, line_no);
            else if (key == "lambda_init") cfg.mlp_options.lambda_init = parse_double(val, line_no);
            else if (key == "lambda_up") cfg.mlp_options.lambda_up = parse_double(val, line_no);
            else if (key == "lambda_down") cfg.mlp_options.lambda_down = parse_double(val, line_no);
            else if (key == "lambda_max") cfg.mlp_options.lambda_max = parse_double(val, line_no);
            else if (key == "max_validation_failures")
                cfg.mlp_options.max_validation_failures = parse_size(val, line_no);
            else if (key == "seed") cfg.mlp_seed = parse_u64(val, line_no);
            else throw unknown();
        } else if (section == "rbf") {
            if (key == "max_neurons") cfg.rbf_max_neurons = parse_size(val, line_no);
            else if (key == "goal_mse") cfg.rbf_goal_mse = parse_double(val, line_no);
            else if (key == "spread_normalized")
                cfg.rbf_spread_normalized = parse_double(val, line_no);
            else if (key == "spread_real") cfg.rbf_spread_real = parse_double(val, line_no);
            else if (key == "include_bias") cfg.rbf_include_bias = parse_bool(val, line_no);
            else throw unknown();
        } else { // report
            if (key == "goal_normalized") cfg.report_goal_normalized = parse_double(val, line_no);
            else if (key == "goal_real") cfg.report_goal_real = parse_double(val, line_no);
            else if (key == "histogram_bins") cfg.histogram_bins = parse_size(val, line_no);
            else throw unknown();
        }
    }
    return cfg;
}

} // namespace tricept::config
