#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cogd/cli.hpp"

using namespace cogd::cli;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
}

int run_argv(std::vector<std::string> args) {
    std::vector<const char*> argv{"cogd"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config files parse values, comments, and blanks") {
    fs::path p = write_temp("cogd_cfg_ok.cfg",
                            "# experiment\n"
                            "optimizer = adam\n"
                            "lr = 0.1\n"
                            "\n"
                            "iters = 50   # short run\n"
                            "cogd = true\n"
                            "seed = 9\n");
    ExperimentConfig cfg = load_config(p.string());
    CHECK(cfg.optimizer == "adam");
    CHECK(cfg.lr == 0.1);
    CHECK(cfg.iters == 50);
    CHECK(cfg.cogd);
    CHECK(cfg.seed == 9);
    CHECK(cfg.seed_set);
    fs::remove(p);
}

TEST_CASE("unknown keys report the file and line") {
    ExperimentConfig cfg;
    try {
        apply_config_line(cfg, "no_such_key = 1", 7, "exp.cfg");
        FAIL("expected a config error");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.find("exp.cfg:7") != std::string::npos);
        CHECK(msg.find("no_such_key") != std::string::npos);
    }
}

TEST_CASE("type mismatches report the line") {
    ExperimentConfig cfg;
    CHECK_THROWS_WITH_AS(apply_config_line(cfg, "lr = fast", 3, "f.cfg"),
                         doctest::Contains("f.cfg:3"), std::exception);
    CHECK_THROWS_WITH_AS(apply_config_line(cfg, "iters = 10x", 4, "f.cfg"),
                         doctest::Contains("f.cfg:4"), std::exception);
    CHECK_THROWS_WITH_AS(apply_config_line(cfg, "just a line", 5, "f.cfg"),
                         doctest::Contains("f.cfg:5"), std::exception);
}

TEST_CASE("resolved text echoes every key") {
    ExperimentConfig cfg;
    std::string text = cfg.resolved_text();
    for (const char* key : {"workload", "optimizer", "lr", "cogd", "beta_scale", "lambda",
                            "keep", "seed", "out"})
        CHECK(text.find(std::string(key) + " = ") != std::string::npos);
}

TEST_CASE("config round trip through resolved text") {
    ExperimentConfig cfg;
    cfg.optimizer = "momentum";
    cfg.lr = 0.005;
    cfg.keep = 0.4;
    fs::path p = write_temp("cogd_cfg_rt.cfg", cfg.resolved_text());
    ExperimentConfig back = load_config(p.string());
    CHECK(back.optimizer == "momentum");
    CHECK(back.lr == 0.005);
    CHECK(back.keep == 0.4);
    fs::remove(p);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_argv({"no-such-command"}) == kUsage);
    CHECK(run_argv({"toy", "--no-such-flag"}) == kUsage);
    CHECK(run_argv({}) == kUsage);
}

TEST_CASE("bad config files exit with code 3, missing ones with 4") {
    fs::path bad = write_temp("cogd_cfg_bad.cfg", "bogus_key = 1\n");
    CHECK(run_argv({"toy", "--config", bad.string()}) == kConfigError);
    fs::remove(bad);
    CHECK(run_argv({"toy", "--config", "/nonexistent/x.cfg"}) == kIoError);
}

TEST_CASE("unreadable inputs exit with code 4") {
    CHECK(run_argv({"metrics", "--ref", "/nonexistent/a.pgm", "--test", "/nonexistent/b.pgm",
                    "--out", fs::temp_directory_path().string()}) == kIoError);
}

TEST_CASE("a toy run writes traces and the resolved config") {
    fs::path out = fs::temp_directory_path() / "cogd_cli_toy";
    fs::remove_all(out);
    CHECK(run_argv({"toy", "--optimizer", "adam", "--lr", "0.1", "--iters", "20", "--cogd",
                    "--seed", "3", "--out", out.string()}) == kOk);
    bool found_trace = false, found_cfg = false, found_cogd = false;
    for (const auto& run_dir : fs::directory_iterator(out))
        for (const auto& f : fs::directory_iterator(run_dir)) {
            found_trace |= f.path().filename() == "trace_baseline.csv";
            found_cogd |= f.path().filename() == "trace_cogd.csv";
            found_cfg |= f.path().filename() == "config.resolved";
        }
    CHECK(found_trace);
    CHECK(found_cogd);
    CHECK(found_cfg);
    fs::remove_all(out);
}
