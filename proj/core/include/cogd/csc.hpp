#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cogd/dense.hpp"
#include "cogd/image_io.hpp"
#include "cogd/optim.hpp"

namespace cogd {

// K square filters of side k, each constrained to the l2 unit ball.
struct FilterBank {
    std::size_t k = 11;
    std::vector<std::vector<double>> filters;

    std::size_t count() const { return filters.size(); }
    std::vector<double> l2_norms() const;

    // Flat binary format: magic "COGDFB1\n", K and k as u32 LE, then
    // K*k*k doubles LE.
    std::vector<std::uint8_t> serialize() const;
    static FilterBank deserialize(const std::vector<std::uint8_t>& bytes);
    void save(const std::string& path) const;
    static FilterBank load(const std::string& path);
};

// One sparse feature map per filter, image-sized.
struct CodeMaps {
    std::vector<ImageGrid> maps;
    double lambda = 0.05;
};

// Splitting variables and scaled duals, persisted across epochs for warm
// starts.
struct AdmmState {
    double rho = 1.0;
    double cg_tol = 1e-6;
    std::int64_t cg_max_iters = 50;
    std::vector<double> primal_residuals;
    std::vector<double> dual_residuals;
    bool cg_stalled = false;

    std::vector<ImageGrid> code_split;   // z for the code subproblem
    std::vector<ImageGrid> code_dual;    // u for the code subproblem
    std::vector<std::vector<double>> kernel_split;
    std::vector<std::vector<double>> kernel_dual;
};

void soft_threshold(std::vector<double>& v, double t);
std::vector<double> soft_thresholded(const std::vector<double>& v, double t);

// v / max(1, ||v||_2).
std::vector<double> project_unit_ball(const std::vector<double>& v);

// sum_k a_k (circular conv) x_k.
ImageGrid reconstruct(const FilterBank& bank, const CodeMaps& codes);

// 1/2 ||b - M Ax||^2 + lambda ||x||_1 (mask omitted when null).
double csc_objective(const FilterBank& bank, const CodeMaps& codes, const ImageGrid& image,
                     const InpaintingMask* mask, double* data_term = nullptr,
                     double* l1_term = nullptr);

// ADMM on the code subproblem with filters fixed; quadratic step by
// conjugate gradient against the circulant operator, l1 step by soft
// thresholding.
CodeMaps code_update(const FilterBank& bank, const CodeMaps& codes, const ImageGrid& image,
                     const InpaintingMask* mask, AdmmState& admm, std::int64_t inner_iters);

// ADMM on the filter subproblem with codes fixed; the ball projection is the
// final step, so returned filters satisfy the constraint exactly.
FilterBank kernel_update(const FilterBank& bank, const std::vector<CodeMaps>& codes,
                         const std::vector<ImageGrid>& images, AdmmState& admm,
                         std::int64_t inner_iters);

// Per-filter coordination: alpha_x is the mean of ||x_k||_1, alpha_A the
// median of the filter l2 norms; fired filters get x_next + beta (el.)
// x_prev with beta = beta_scale * eta * c from epoch-difference ratios.
CodeMaps cogd_coordinate_codes(const FilterBank& bank, const FilterBank& bank_prev,
                               const CodeMaps& codes_next, const CodeMaps& codes_prev,
                               const ImageGrid& ghat, const CoGDConfig& cfg, double eta,
                               std::vector<bool>* fired = nullptr);

struct EpochStats {
    std::int64_t epoch = 0;
    double objective = 0.0;
    double l1_term = 0.0;
    double data_term = 0.0;
    std::int64_t detector_fired_count = 0;
};

// header: epoch,objective,l1_term,data_term,detector_fired_count
std::string history_to_csv(const std::vector<EpochStats>& history);

struct LearnOptions {
    std::size_t num_filters = 16;
    std::size_t filter_size = 11;
    double lambda = 0.05;
    std::int64_t outer_epochs = 20;
    std::int64_t inner_iters = 10;
    double rho = 1.0;
    double cg_tol = 1e-6;
    std::int64_t cg_max_iters = 50;
    double cogd_eta = 1.0;  // the eta in beta = beta_scale * eta * c
    std::uint64_t seed = 1;
};

struct LearnResult {
    FilterBank bank;
    std::vector<CodeMaps> codes;  // one per image
    std::vector<EpochStats> history;
};

// Filter learning over a set of images (optionally masked); filters start as
// unit-norm Gaussian samples, codes as zeros. Coordination runs once per
// outer epoch, before the inner updates.
LearnResult learn(const std::vector<ImageGrid>& images, const LearnOptions& opts,
                  const std::optional<CoGDConfig>& cogd,
                  const std::vector<InpaintingMask>* masks = nullptr);

// Infer codes for a (possibly masked) image with fixed filters, then render
// the full reconstruction.
ImageGrid inpaint(const ImageGrid& image, const FilterBank& bank, const InpaintingMask& mask,
                  double lambda, std::int64_t inner_iters = 10, std::int64_t repeats = 5);

}  // namespace cogd
