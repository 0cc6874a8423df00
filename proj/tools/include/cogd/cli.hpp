#pragma once

#include <cstdint>
#include <string>

namespace cogd::cli {

// Distinct exit codes, documented in --help output.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,        // unknown flag / bad command line
    kConfigError = 3,  // unknown key or type mismatch in a config file
    kIoError = 4,      // unreadable input / unwritable output
    kInvalidValue = 5, // semantically invalid configuration value
};

// Resolved experiment configuration; one flat struct shared by every
// subcommand, echoed into the run directory as config.resolved.
struct ExperimentConfig {
    std::string workload;
    // optimizer
    std::string optimizer = "sgd";
    double lr = 0.001;
    double momentum = 0.9;
    // cogd
    bool cogd = false;
    double beta_scale = 0.001;
    double alpha_x = 1.0;
    double alpha_a = 0.5;
    double cogd_eta = 1.0;
    // workload knobs
    std::int64_t iters = 200;
    std::int64_t epochs = 20;
    std::int64_t inner_iters = 10;
    std::int64_t filters = 16;
    std::int64_t kernel_size = 11;
    double lambda = 0.05;
    double lambda_m = 0.01;
    double prune_rate = 0.5;
    double keep = 0.25;
    double start_x1 = 1.0;
    double start_x2 = 1.5;
    double c3 = 2.62;
    bool normalize = false;
    // paths
    std::string images;
    std::string filters_path;
    std::string ref_path;
    std::string test_path;
    std::string out_dir = ".";
    // rng
    std::uint64_t seed = 0;
    bool seed_set = false;

    std::string resolved_text() const;
};

// Flat key=value file, one pair per line, '#' comments; unknown keys and type
// mismatches are errors naming the offending line.
ExperimentConfig load_config(const std::string& path);
void apply_config_line(ExperimentConfig& cfg, const std::string& line, int lineno,
                       const std::string& path);

int run(int argc, const char* const* argv);

}  // namespace cogd::cli
