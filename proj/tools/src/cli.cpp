#include "cogd/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cogd/bilinear.hpp"
#include "cogd/csc.hpp"
#include "cogd/image_io.hpp"
#include "cogd/metrics.hpp"
#include "cogd/optim.hpp"
#include "cogd/prune.hpp"

namespace fs = std::filesystem;

namespace cogd::cli {

namespace {

struct ConfigKey {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

long long parse_int(const std::string& v) {
    std::size_t used = 0;
    long long out = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return out;
}

double parse_real(const std::string& v) {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("expected boolean");
}

const std::map<std::string, ConfigKey>& key_table() {
    static const std::map<std::string, ConfigKey> table = {
        {"workload", {[](auto& c, const auto& v) { c.workload = v; },
                      [](const auto& c) { return c.workload; }}},
        {"optimizer", {[](auto& c, const auto& v) { c.optimizer = v; },
                       [](const auto& c) { return c.optimizer; }}},
        {"lr", {[](auto& c, const auto& v) { c.lr = parse_real(v); },
                [](const auto& c) { return format_double(c.lr); }}},
        {"momentum", {[](auto& c, const auto& v) { c.momentum = parse_real(v); },
                      [](const auto& c) { return format_double(c.momentum); }}},
        {"cogd", {[](auto& c, const auto& v) { c.cogd = parse_bool(v); },
                  [](const auto& c) { return std::string(c.cogd ? "true" : "false"); }}},
        {"beta_scale", {[](auto& c, const auto& v) { c.beta_scale = parse_real(v); },
                        [](const auto& c) { return format_double(c.beta_scale); }}},
        {"alpha_x", {[](auto& c, const auto& v) { c.alpha_x = parse_real(v); },
                     [](const auto& c) { return format_double(c.alpha_x); }}},
        {"alpha_a", {[](auto& c, const auto& v) { c.alpha_a = parse_real(v); },
                     [](const auto& c) { return format_double(c.alpha_a); }}},
        {"cogd_eta", {[](auto& c, const auto& v) { c.cogd_eta = parse_real(v); },
                      [](const auto& c) { return format_double(c.cogd_eta); }}},
        {"iters", {[](auto& c, const auto& v) { c.iters = parse_int(v); },
                   [](const auto& c) { return std::to_string(c.iters); }}},
        {"epochs", {[](auto& c, const auto& v) { c.epochs = parse_int(v); },
                    [](const auto& c) { return std::to_string(c.epochs); }}},
        {"inner_iters", {[](auto& c, const auto& v) { c.inner_iters = parse_int(v); },
                         [](const auto& c) { return std::to_string(c.inner_iters); }}},
        {"filters", {[](auto& c, const auto& v) { c.filters = parse_int(v); },
                     [](const auto& c) { return std::to_string(c.filters); }}},
        {"kernel_size", {[](auto& c, const auto& v) { c.kernel_size = parse_int(v); },
                         [](const auto& c) { return std::to_string(c.kernel_size); }}},
        {"lambda", {[](auto& c, const auto& v) { c.lambda = parse_real(v); },
                    [](const auto& c) { return format_double(c.lambda); }}},
        {"lambda_m", {[](auto& c, const auto& v) { c.lambda_m = parse_real(v); },
                      [](const auto& c) { return format_double(c.lambda_m); }}},
        {"prune_rate", {[](auto& c, const auto& v) { c.prune_rate = parse_real(v); },
                        [](const auto& c) { return format_double(c.prune_rate); }}},
        {"keep", {[](auto& c, const auto& v) { c.keep = parse_real(v); },
                  [](const auto& c) { return format_double(c.keep); }}},
        {"start_x1", {[](auto& c, const auto& v) { c.start_x1 = parse_real(v); },
                      [](const auto& c) { return format_double(c.start_x1); }}},
        {"start_x2", {[](auto& c, const auto& v) { c.start_x2 = parse_real(v); },
                      [](const auto& c) { return format_double(c.start_x2); }}},
        {"c3", {[](auto& c, const auto& v) { c.c3 = parse_real(v); },
                [](const auto& c) { return format_double(c.c3); }}},
        {"normalize", {[](auto& c, const auto& v) { c.normalize = parse_bool(v); },
                       [](const auto& c) { return std::string(c.normalize ? "true" : "false"); }}},
        {"images", {[](auto& c, const auto& v) { c.images = v; },
                    [](const auto& c) { return c.images; }}},
        {"filters_path", {[](auto& c, const auto& v) { c.filters_path = v; },
                          [](const auto& c) { return c.filters_path; }}},
        {"ref", {[](auto& c, const auto& v) { c.ref_path = v; },
                 [](const auto& c) { return c.ref_path; }}},
        {"test", {[](auto& c, const auto& v) { c.test_path = v; },
                  [](const auto& c) { return c.test_path; }}},
        {"out", {[](auto& c, const auto& v) { c.out_dir = v; },
                 [](const auto& c) { return c.out_dir; }}},
        {"seed", {[](auto& c, const auto& v) {
                      c.seed = static_cast<std::uint64_t>(parse_int(v));
                      c.seed_set = true;
                  },
                  [](const auto& c) { return std::to_string(c.seed); }}},
    };
    return table;
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace

std::string ExperimentConfig::resolved_text() const {
    std::string out;
    for (const auto& [name, key] : key_table()) {
        out += name;
        out += " = ";
        out += key.get(*this);
        out += '\n';
    }
    return out;
}

void apply_config_line(ExperimentConfig& cfg, const std::string& raw, int lineno,
                       const std::string& path) {
    std::string line = raw;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
    if (line.empty()) return;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
    val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));

    const auto& table = key_table();
    auto it = table.find(key);
    if (it == table.end())
        throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key \"" + key + "\"");
    try {
        it->second.set(cfg, val);
    } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": cannot parse value \"" + val +
                          "\" for key \"" + key + "\"");
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) apply_config_line(cfg, line, ++lineno, path);
    return cfg;
}

namespace {

std::uint64_t resolve_seed(const ExperimentConfig& cfg) {
    if (cfg.seed_set) return cfg.seed;
    if (const char* env = std::getenv("COGD_SEED")) return std::strtoull(env, nullptr, 10);
    return static_cast<std::uint64_t>(
        std::chrono::system_clock::now().time_since_epoch().count());
}

fs::path make_run_dir(const ExperimentConfig& cfg) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", &tm_utc);
    fs::path dir = fs::path(cfg.out_dir) /
                   (cfg.workload + "-" + stamp + "-seed" + std::to_string(cfg.seed));
    // Avoid collisions from back-to-back runs within one second.
    fs::path candidate = dir;
    for (int i = 1; fs::exists(candidate); ++i)
        candidate = dir.string() + "-" + std::to_string(i);
    fs::create_directories(candidate);
    return candidate;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
}

std::vector<std::pair<std::string, ImageGrid>> load_images(const ExperimentConfig& cfg) {
    if (cfg.images.empty()) throw IoError("no input images given (--images)");
    std::vector<fs::path> paths;
    fs::path root(cfg.images);
    if (fs::is_directory(root)) {
        for (const auto& e : fs::directory_iterator(root))
            if (e.path().extension() == ".pgm") paths.push_back(e.path());
        std::sort(paths.begin(), paths.end());
    } else {
        paths.push_back(root);
    }
    if (paths.empty()) throw IoError("no .pgm images found under " + cfg.images);
    std::vector<std::pair<std::string, ImageGrid>> out;
    for (const auto& p : paths) {
        ImageGrid img = read_pgm_file(p.string());
        if (cfg.normalize) img = contrast_normalize(img);
        out.emplace_back(p.stem().string(), std::move(img));
    }
    return out;
}

OptimizerConfig make_optimizer(const ExperimentConfig& cfg) {
    OptimizerConfig opt;
    if (cfg.optimizer == "sgd") {
        opt.kind = OptimizerKind::Sgd;
    } else if (cfg.optimizer == "momentum") {
        opt.kind = OptimizerKind::Momentum;
    } else if (cfg.optimizer == "adam") {
        opt.kind = OptimizerKind::Adam;
    } else {
        throw ConfigError("unknown optimizer \"" + cfg.optimizer + "\"");
    }
    opt.learning_rate = cfg.lr;
    opt.momentum_coef = cfg.momentum;
    return opt;
}

int run_toy(ExperimentConfig cfg) {
    const fs::path dir = make_run_dir(cfg);
    write_text(dir / "config.resolved", cfg.resolved_text());

    ToyRunOptions run;
    run.start_x1 = cfg.start_x1;
    run.start_x2 = cfg.start_x2;
    run.iters = cfg.iters;
    run.c3 = cfg.c3;

    OptimizerConfig opt = make_optimizer(cfg);
    OptTrace baseline = cogd::run_toy(opt, std::nullopt, run);
    write_text(dir / "trace_baseline.csv", baseline.to_csv());

    if (cfg.cogd) {
        CoGDConfig cc;
        cc.beta_scale = cfg.beta_scale;
        cc.alpha_x = cfg.alpha_x;
        cc.alpha_A = cfg.alpha_a;
        OptTrace with = cogd::run_toy(opt, cc, run);
        write_text(dir / "trace_cogd.csv", with.to_csv());
        std::cout << "path_length baseline=" << format_double(baseline.path_length)
                  << " cogd=" << format_double(with.path_length) << "\n";
    } else {
        std::cout << "path_length baseline=" << format_double(baseline.path_length) << "\n";
    }

    // Contour grid of the constrained objective for external plotting.
    std::string contour = "x1,x2,F\n";
    for (int i = -40; i <= 40; ++i)
        for (int j = -40; j <= 40; ++j) {
            BealeProblem p;
            p.c3 = cfg.c3;
            p.x1 = i / 10.0;
            p.x2 = j / 10.0;
            contour += format_double(p.x1) + "," + format_double(p.x2) + "," +
                       format_double(beale_constrained_value(p)) + "\n";
        }
    write_text(dir / "contour.csv", contour);
    std::cout << "run dir: " << dir.string() << "\n";
    return kOk;
}

std::optional<CoGDConfig> make_csc_cogd(const ExperimentConfig& cfg) {
    if (!cfg.cogd) return std::nullopt;
    CoGDConfig cc;
    cc.beta_scale = cfg.beta_scale;
    return cc;
}

LearnOptions make_learn_options(const ExperimentConfig& cfg) {
    LearnOptions lo;
    lo.num_filters = static_cast<std::size_t>(cfg.filters);
    lo.filter_size = static_cast<std::size_t>(cfg.kernel_size);
    lo.lambda = cfg.lambda;
    lo.outer_epochs = cfg.epochs;
    lo.inner_iters = cfg.inner_iters;
    lo.cogd_eta = cfg.cogd_eta;
    lo.seed = cfg.seed;
    return lo;
}

int run_csc_learn(ExperimentConfig cfg) {
    const fs::path dir = make_run_dir(cfg);
    write_text(dir / "config.resolved", cfg.resolved_text());
    auto named = load_images(cfg);
    std::vector<ImageGrid> images;
    for (auto& [name, img] : named) images.push_back(img);

    LearnResult res = learn(images, make_learn_options(cfg), make_csc_cogd(cfg));
    res.bank.save((dir / "bank.bin").string());
    write_text(dir / "history.csv", history_to_csv(res.history));
    std::cout << "final objective: " << format_double(res.history.back().objective) << "\n";
    std::cout << "run dir: " << dir.string() << "\n";
    return kOk;
}

int run_csc_reconstruct(ExperimentConfig cfg) {
    const fs::path dir = make_run_dir(cfg);
    write_text(dir / "config.resolved", cfg.resolved_text());
    if (cfg.filters_path.empty()) throw IoError("missing --filters");
    FilterBank bank = FilterBank::load(cfg.filters_path);
    auto named = load_images(cfg);

    QualityReport report;
    for (auto& [name, img] : named) {
        InpaintingMask full;
        full.height = img.height;
        full.width = img.width;
        full.keep_fraction = 1.0;
        full.grid.assign(img.size(), 1.0);
        ImageGrid recon = inpaint(img, bank, full, cfg.lambda, cfg.inner_iters);
        write_pgm_file(recon, (dir / (name + "_recon.pgm")).string());
        report.entries.push_back({name, psnr(img, recon), ssim(img, recon)});
    }
    write_text(dir / "quality.csv", report.to_csv());
    std::cout << "mean psnr=" << format_double(report.mean_psnr())
              << " mean ssim=" << format_double(report.mean_ssim()) << "\n";
    std::cout << "run dir: " << dir.string() << "\n";
    return kOk;
}

int run_csc_inpaint(ExperimentConfig cfg) {
    const fs::path dir = make_run_dir(cfg);
    write_text(dir / "config.resolved", cfg.resolved_text());
    if (cfg.filters_path.empty()) throw IoError("missing --filters");
    FilterBank bank = FilterBank::load(cfg.filters_path);
    auto named = load_images(cfg);

    QualityReport report;
    std::uint64_t idx = 0;
    for (auto& [name, img] : named) {
        InpaintingMask mask =
            make_subsample_mask(img.height, img.width, cfg.keep, cfg.seed + idx);
        ++idx;
        ImageGrid recon = inpaint(img, bank, mask, cfg.lambda, cfg.inner_iters);
        write_pgm_file(recon, (dir / (name + "_inpaint.pgm")).string());
        report.entries.push_back({name, psnr(img, recon), ssim(img, recon)});
    }
    write_text(dir / "quality.csv", report.to_csv());
    std::cout << "mean psnr=" << format_double(report.mean_psnr())
              << " mean ssim=" << format_double(report.mean_ssim()) << "\n";
    std::cout << "run dir: " << dir.string() << "\n";
    return kOk;
}

int run_prune_toy(ExperimentConfig cfg) {
    const fs::path dir = make_run_dir(cfg);
    write_text(dir / "config.resolved", cfg.resolved_text());

    PlantedTask task = make_planted_task(8, 2, 3, 8, 16, cfg.seed);
    MaskedConvLayer layer = task.init;
    PruneTrainOptions train;
    train.epochs = cfg.epochs;
    train.learning_rate = cfg.lr;
    train.weight_decay = 0.001;

    std::optional<PruneConfig> pc;
    PruneConfig base;
    base.lambda_m = cfg.lambda_m;
    base.prune_rate_a = cfg.prune_rate;
    if (cfg.cogd) {
        base.beta_scale = cfg.beta_scale;
        pc = base;
    } else {
        base.beta_scale = 0.0;
        pc = base;  // same regularizers, coordination disabled
    }
    PruneTrace trace = train_toy_pruner(layer, task.dataset, train, pc);
    write_text(dir / "trajectory.csv", trace.to_csv());
    write_text(dir / "pruned.txt", trace.pruned_report(base.alpha_m));
    std::cout << trace.pruned_report(base.alpha_m);
    std::cout << "run dir: " << dir.string() << "\n";
    return kOk;
}

int run_metrics(ExperimentConfig cfg) {
    if (cfg.ref_path.empty() || cfg.test_path.empty())
        throw IoError("metrics needs --ref and --test");
    const fs::path dir = make_run_dir(cfg);
    write_text(dir / "config.resolved", cfg.resolved_text());
    ImageGrid ref = read_pgm_file(cfg.ref_path);
    ImageGrid test = read_pgm_file(cfg.test_path);
    QualityReport report;
    report.entries.push_back(
        {fs::path(cfg.test_path).stem().string(), psnr(ref, test), ssim(ref, test)});
    write_text(dir / "quality.csv", report.to_csv());
    std::cout << "psnr " << format_double(report.entries[0].psnr_db) << "\nssim "
              << format_double(report.entries[0].ssim) << "\n";
    return kOk;
}

void add_common_options(CLI::App* sub, ExperimentConfig& cfg, std::string& config_path) {
    sub->add_option("--config", config_path, "flat key=value config file");
    sub->add_option("--seed", cfg.seed, "PRNG seed (else $COGD_SEED, else time-derived)")
        ->each([&cfg](const std::string&) { cfg.seed_set = true; });
    sub->add_option("--out", cfg.out_dir, "parent directory for the run directory");
}

}  // namespace

int run(int argc, const char* const* argv) {
    ExperimentConfig cfg;

    // The config file (when given) provides defaults; explicit flags override
    // it, so apply it before CLI11 writes parsed values.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                cfg = load_config(argv[i + 1]);
            } catch (const ConfigError& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return kConfigError;
            } catch (const IoError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kIoError;
            }
            break;
        }
    }

    CLI::App app{
        "cogd: coupled-variable gradient descent experiments\n"
        "exit codes: 0 ok, 2 bad usage/unknown flag, 3 config file error,\n"
        "4 unreadable input or unwritable output, 5 invalid config value"};
    app.require_subcommand(1);
    std::string config_path;

    auto* toy = app.add_subcommand("toy", "constrained toy objective, baseline vs coordinated");
    add_common_options(toy, cfg, config_path);
    toy->add_option("--optimizer", cfg.optimizer, "sgd|momentum|adam");
    toy->add_option("--lr", cfg.lr, "learning rate");
    toy->add_option("--iters", cfg.iters, "iteration count");
    toy->add_flag("--cogd", cfg.cogd, "also run the coordinated variant");
    toy->add_option("--beta-scale", cfg.beta_scale, "projection beta scale");
    toy->add_option("--alpha-x", cfg.alpha_x, "sparse-variable threshold");
    toy->add_option("--alpha-a", cfg.alpha_a, "coupled-variable threshold");
    toy->add_option("--start-x1", cfg.start_x1, "start point x1");
    toy->add_option("--start-x2", cfg.start_x2, "start point x2");
    toy->add_option("--c3", cfg.c3, "third objective constant (2.62 or 2.625)");

    auto* learn_cmd = app.add_subcommand("csc-learn", "learn a convolutional filter bank");
    add_common_options(learn_cmd, cfg, config_path);
    learn_cmd->add_option("--images", cfg.images, "PGM file or directory")->required();
    learn_cmd->add_option("--filters", cfg.filters, "filter count");
    learn_cmd->add_option("--kernel-size", cfg.kernel_size, "filter side length");
    learn_cmd->add_option("--lambda", cfg.lambda, "sparsity weight");
    learn_cmd->add_option("--epochs", cfg.epochs, "outer epochs");
    learn_cmd->add_option("--inner-iters", cfg.inner_iters, "inner iterations per subproblem");
    learn_cmd->add_flag("--cogd", cfg.cogd, "enable coordination");
    learn_cmd->add_option("--beta-scale", cfg.beta_scale, "projection beta scale");
    learn_cmd->add_option("--cogd-eta", cfg.cogd_eta, "eta factor inside beta");
    learn_cmd->add_flag("--normalize", cfg.normalize, "contrast-normalize inputs");

    auto* rec = app.add_subcommand("csc-reconstruct", "reconstruct images with fixed filters");
    add_common_options(rec, cfg, config_path);
    rec->add_option("--images", cfg.images, "PGM file or directory")->required();
    rec->add_option("--filters", cfg.filters_path, "filter bank file")->required();
    rec->add_option("--lambda", cfg.lambda, "sparsity weight");
    rec->add_option("--inner-iters", cfg.inner_iters, "inner iterations");
    rec->add_flag("--normalize", cfg.normalize, "contrast-normalize inputs");

    auto* inp = app.add_subcommand("csc-inpaint", "inpaint subsampled images with fixed filters");
    add_common_options(inp, cfg, config_path);
    inp->add_option("--images", cfg.images, "PGM file or directory")->required();
    inp->add_option("--filters", cfg.filters_path, "filter bank file")->required();
    inp->add_option("--keep", cfg.keep, "fraction of pixels kept");
    inp->add_option("--lambda", cfg.lambda, "sparsity weight");
    inp->add_option("--inner-iters", cfg.inner_iters, "inner iterations");
    inp->add_flag("--normalize", cfg.normalize, "contrast-normalize inputs");

    auto* pr = app.add_subcommand("prune-toy", "planted-channel pruning demonstration");
    add_common_options(pr, cfg, config_path);
    pr->add_option("--epochs", cfg.epochs, "training epochs");
    pr->add_option("--lr", cfg.lr, "learning rate");
    pr->add_option("--lambda-m", cfg.lambda_m, "mask sparsity weight");
    pr->add_option("--prune-rate", cfg.prune_rate, "a in the (1-a) pruning-rate convention");
    pr->add_flag("--cogd", cfg.cogd, "enable coordination");
    pr->add_option("--beta-scale", cfg.beta_scale, "projection beta scale");

    auto* met = app.add_subcommand("metrics", "PSNR/SSIM between two PGM images");
    add_common_options(met, cfg, config_path);
    met->add_option("--ref", cfg.ref_path, "reference image")->required();
    met->add_option("--test", cfg.test_path, "image under test")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        cfg.seed = resolve_seed(cfg);
        cfg.seed_set = true;
        if (toy->parsed()) {
            cfg.workload = "toy";
            return run_toy(cfg);
        }
        if (learn_cmd->parsed()) {
            cfg.workload = "csc-learn";
            if (!learn_cmd->count("--beta-scale") && cfg.beta_scale == 0.001)
                cfg.beta_scale = 0.1;  // CSC-scale default
            return run_csc_learn(cfg);
        }
        if (rec->parsed()) {
            cfg.workload = "csc-reconstruct";
            return run_csc_reconstruct(cfg);
        }
        if (inp->parsed()) {
            cfg.workload = "csc-inpaint";
            return run_csc_inpaint(cfg);
        }
        if (pr->parsed()) {
            cfg.workload = "prune-toy";
            // demo-scale defaults; the generic ones suit the toy/CSC workloads
            if (!pr->count("--lr") && cfg.lr == 0.001) cfg.lr = 0.05;
            if (!pr->count("--lambda-m") && cfg.lambda_m == 0.01) cfg.lambda_m = 0.8;
            if (!pr->count("--epochs") && cfg.epochs == 20) cfg.epochs = 500;
            if (!pr->count("--beta-scale") && cfg.beta_scale == 0.001)
                cfg.beta_scale = 20.0;
            return run_prune_toy(cfg);
        }
        if (met->parsed()) {
            cfg.workload = "metrics";
            return run_metrics(cfg);
        }
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const PgmError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid value: " << e.what() << "\n";
        return kInvalidValue;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    }
}

}  // namespace cogd::cli
