#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = "/tmp/tricept_cli_tests";

std::string cli() { return TRICEPT_CLI_PATH; }

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args) {
    const fs::path out = kRoot / "stdout.txt";
    const fs::path err = kRoot / "stderr.txt";
    const std::string cmd = cli() + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path fresh_dir(const char* name) {
    const fs::path p = kRoot / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

// Small corpus and tiny networks keep each training call well under a
// second; the loose goals make every verdict pass.
const char* kFastConfig =
    "[sampling]\n"
    "n = 64\n"
    "[mlp]\n"
    "hidden = 4\n"
    "max_epochs = 25\n"
    "[rbf]\n"
    "max_neurons = 6\n"
    "[report]\n"
    "goal_normalized = 10\n"
    "goal_real = 1e9\n";

struct Setup {
    Setup() { fs::create_directories(kRoot); }
};
const Setup setup;

} // namespace

TEST_CASE("help exits cleanly") {
    CHECK(run("--help").code == 0);
    CHECK(run("gen-data --help").code == 0);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run("").code == 2);                 // a subcommand is required
    CHECK(run("frobnicate").code == 2);       // unknown subcommand
    CHECK(run("gen-data --bogus x").code == 2);
    CHECK(run("predict --theta 0 --psi 0 --c 500").code == 2); // --model missing
    CHECK(run("train-mlp --space sideways").code == 2);
}

TEST_CASE("configuration errors exit with 2") {
    const fs::path dir = fresh_dir("config_errors");
    CHECK(run("gen-data --config " + (dir / "missing.ini").string()).code == 2);

    write_file(dir / "broken.ini", "[sampling]\nn = ten\n");
    RunResult r = run("gen-data --config " + (dir / "broken.ini").string());
    CHECK(r.code == 2);
    CHECK(r.err.find("error:") != std::string::npos);

    write_file(dir / "invalid.ini", "[geometry]\na = 0\nb = 0\n");
    CHECK(run("gen-data --config " + (dir / "invalid.ini").string()).code == 2);

    write_file(dir / "ok.ini", kFastConfig);
    CHECK(run("predict --config " + (dir / "ok.ini").string() +
              " --model x --theta 0 --psi 0 --c -5")
              .code == 2);
}

TEST_CASE("gen-data writes the dataset artifacts") {
    const fs::path dir = fresh_dir("gen");
    const fs::path cfg = dir / "run.ini";
    write_file(cfg, kFastConfig);

    RunResult r = run("gen-data --config " + cfg.string() + " --out " + (dir / "a").string());
    CHECK(r.code == 0);
    for (const char* name :
         {"dataset.csv", "dataset_normalized.csv", "normmap.txt", "stats.txt"})
        CHECK(fs::exists(dir / "a" / name));

    // A second run reproduces the corpus byte for byte.
    CHECK(run("gen-data --config " + cfg.string() + " --out " + (dir / "b").string()).code == 0);
    CHECK(slurp(dir / "a" / "dataset.csv") == slurp(dir / "b" / "dataset.csv"));
    CHECK(slurp(dir / "a" / "dataset_normalized.csv") ==
          slurp(dir / "b" / "dataset_normalized.csv"));
}

TEST_CASE("the master seed drives random sampling") {
    const fs::path dir = fresh_dir("seeds");
    const fs::path cfg = dir / "run.ini";
    write_file(cfg, std::string("[sampling]\nscheme = random\nn = 40\n"));

    auto gen = [&](const char* sub, const std::string& extra) {
        return run("gen-data --config " + cfg.string() + " --out " + (dir / sub).string() +
                   extra)
            .code;
    };
    CHECK(gen("s9a", " --seed 9") == 0);
    CHECK(gen("s9b", " --seed 9") == 0);
    CHECK(gen("s10", " --seed 10") == 0);
    CHECK(slurp(dir / "s9a" / "dataset.csv") == slurp(dir / "s9b" / "dataset.csv"));
    CHECK(slurp(dir / "s9a" / "dataset.csv") != slurp(dir / "s10" / "dataset.csv"));
}

TEST_CASE("training and evaluation pipeline") {
    const fs::path dir = fresh_dir("pipeline");
    const fs::path cfg = dir / "run.ini";
    write_file(cfg, kFastConfig);
    const std::string base = " --config " + cfg.string();
    const std::string data = (dir / "data").string();

    REQUIRE(run("gen-data" + base + " --out " + data).code == 0);

    CHECK(run("train-mlp" + base + " --data " + data + " --out " + data).code == 0);
    CHECK(run("train-rbf" + base + " --data " + data + " --out " + data).code == 0);
    for (const char* name : {"mlp_normalized.model", "mlp_normalized_curve.csv",
                             "mlp_real.model", "mlp_real_curve.csv", "rbf_normalized.model",
                             "rbf_normalized_curve.csv", "rbf_real.model", "rbf_real_curve.csv"})
        CHECK(fs::exists(dir / "data" / name));

    RunResult ev = run("eval" + base + " --data " + data + " --models " + data + " --out " +
                       (dir / "eval").string());
    CHECK(ev.code == 0);
    for (const char* name : {"eval_mlp_normalized.txt", "eval_rbf_normalized.txt",
                             "eval_mlp_real.txt", "eval_rbf_real.txt", "hist_mlp_normalized.csv",
                             "report.txt"})
        CHECK(fs::exists(dir / "eval" / name));
    CHECK(slurp(dir / "eval" / "report.txt").find("overall: pass") != std::string::npos);

    RunResult rep = run("report --eval-dir " + (dir / "eval").string() + " --out " +
                        (dir / "report").string());
    CHECK(rep.code == 0);
    CHECK(slurp(dir / "report" / "report.txt") == slurp(dir / "eval" / "report.txt"));

    // An unreachable goal flips the eval and report exit codes to 1.
    write_file(dir / "tight.ini", std::string(kFastConfig) + "goal_normalized = 1e-12\n");
    RunResult tight = run("eval --config " + (dir / "tight.ini").string() + " --data " + data +
                          " --models " + data + " --out " + (dir / "eval_tight").string());
    CHECK(tight.code == 1);
    CHECK(slurp(dir / "eval_tight" / "report.txt").find("overall: FAIL") != std::string::npos);
    CHECK(run("report --eval-dir " + (dir / "eval_tight").string() + " --out " +
              (dir / "report_tight").string())
              .code == 1);

    // predict against the normalized model, inside the training range.
    const std::string model = (dir / "data" / "mlp_normalized.model").string();
    RunResult pred = run("predict" + base + " --model " + model +
                         " --theta 0.1 --psi -0.1 --c 500");
    CHECK(pred.code == 0);
    CHECK(pred.out.find("q1_predicted") != std::string::npos);
    CHECK(pred.out.find("q3_exact") != std::string::npos);
    CHECK(pred.out.find("max_abs_error") != std::string::npos);
    CHECK(pred.err.empty());

    // Outside the training range the prediction still runs but warns.
    RunResult far = run("predict" + base + " --model " + model +
                        " --theta 0.1 --psi -0.1 --c 633.9");
    CHECK(far.code == 0);
    CHECK(far.err.empty());
    RunResult outside = run("predict" + base + " --model " + model +
                            " --theta 1.2 --psi 0 --c 500");
    CHECK(outside.code == 0);
    CHECK(outside.err.find("warning:") != std::string::npos);
    CHECK(outside.out.find("q1_predicted") != std::string::npos);

    // Same contract for a model without an embedded map.
    const std::string real_model = (dir / "data" / "mlp_real.model").string();
    RunResult real_outside = run("predict" + base + " --model " + real_model +
                                 " --theta 1.2 --psi 0 --c 500");
    CHECK(real_outside.code == 0);
    CHECK(real_outside.err.find("outside the configured pose domain") != std::string::npos);
}

TEST_CASE("missing and malformed inputs map to io exit codes") {
    const fs::path dir = fresh_dir("io_errors");
    const fs::path cfg = dir / "run.ini";
    write_file(cfg, kFastConfig);
    const std::string base = " --config " + cfg.string();

    CHECK(run("train-mlp" + base + " --space normalized --data " + (dir / "nowhere").string() +
              " --out " + dir.string())
              .code == 4);
    CHECK(run("eval" + base + " --data " + (dir / "nowhere").string() + " --models " +
              dir.string() + " --out " + dir.string())
              .code == 4);
    CHECK(run("predict" + base + " --model " + (dir / "missing.model").string() +
              " --theta 0 --psi 0 --c 500")
              .code == 4);

    fs::create_directories(dir / "corrupt");
    write_file(dir / "corrupt" / "dataset_normalized.csv", "theta,psi,c,q1,q2,q3\n1,2,3\n");
    write_file(dir / "corrupt" / "normmap.txt", "tricept-normmap v1\n");
    CHECK(run("train-mlp" + base + " --space normalized --data " + (dir / "corrupt").string() +
              " --out " + dir.string())
              .code == 4);

    // A file that is not a model at all.
    write_file(dir / "notamodel.txt", "hello\n");
    CHECK(run("predict" + base + " --model " + (dir / "notamodel.txt").string() +
              " --theta 0 --psi 0 --c 500")
              .code == 4);
}
