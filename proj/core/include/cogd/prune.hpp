#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cogd/dense.hpp"
#include "cogd/optim.hpp"

namespace cogd {

enum class Activation { Identity, Relu };

// Single convolution layer with a per-output-channel soft mask: output j is
// f(sum_i F_i conv (W_{i,j} * m_j)).
struct MaskedConvLayer {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel_size = 3;
    // weights[i * out_channels + j] is the kernel from input i to output j.
    std::vector<std::vector<double>> weights;
    DenseVector mask;
    Activation activation = Activation::Identity;

    std::vector<double>& w(std::size_t i, std::size_t j) {
        return weights[i * out_channels + j];
    }
    const std::vector<double>& w(std::size_t i, std::size_t j) const {
        return weights[i * out_channels + j];
    }
    // ||sum_i W_{i,j}||_2 per output channel.
    std::vector<double> channel_norms() const;
};

std::vector<ImageGrid> masked_forward(const MaskedConvLayer& layer,
                                      const std::vector<ImageGrid>& inputs);

// Analytic weight gradients for identity activation: m_j times the circular
// correlation of the upstream gradient with the input feature map.
std::vector<std::vector<double>> grad_W(const MaskedConvLayer& layer,
                                        const std::vector<ImageGrid>& inputs,
                                        const std::vector<ImageGrid>& upstream);

// dL/dm_j = sum_i <upstream_j, F_i conv W_{i,j}>.
DenseVector grad_mask(const MaskedConvLayer& layer, const std::vector<ImageGrid>& inputs,
                      const std::vector<ImageGrid>& upstream);

// Elementwise grad / m_j with the division guarded at |m_j| < eps.
std::vector<double> recover_ghat(const std::vector<double>& grad_w_ij, double m_j, double eps);

struct PruneConfig {
    double lambda_m = 0.01;
    double prune_rate_a = 0.5;
    double alpha_m = 0.5;
    double beta_scale = 0.001;
    double mask_div_eps = 1e-8;
    double fd_eps = 1e-8;
};

// Filter-norm threshold at which a fraction a of channels lie above;
// a = 0.5 gives the median.
double alpha_w_threshold(const std::vector<double>& channel_norms, double a);

// Per-channel coordination of the mask update; ghat indexed like weights,
// deltas are epoch-boundary differences.
DenseVector mask_cogd_update(const DenseVector& m_next, const DenseVector& m_prev,
                             const MaskedConvLayer& layer,
                             const std::vector<std::vector<double>>& ghat,
                             const std::vector<std::vector<double>>& delta_w,
                             const DenseVector& delta_m, const PruneConfig& cfg, double eta,
                             std::vector<bool>* fired = nullptr);

struct PruneSample {
    std::vector<ImageGrid> input;
    std::vector<ImageGrid> target;
};

struct PruneEpochRecord {
    std::int64_t epoch = 0;
    std::vector<double> mask_values;
    std::vector<double> filter_norms;
    std::vector<bool> detector_fired;   // per channel, this epoch
    std::vector<bool> async_channels;   // (not s(m_j)) and s(W_j), observed state
    double loss = 0.0;
};

struct PruneTrace {
    std::vector<PruneEpochRecord> epochs;
    // header: epoch,channel,mask_value,filter_norm,detector_fired
    std::string to_csv() const;
    // plain-text kept/pruned report, one channel per line
    std::string pruned_report(double threshold) const;
};

struct PruneTrainOptions {
    std::int64_t epochs = 200;
    double learning_rate = 0.005;
    double weight_decay = 0.0;  // l2 on W
};

// Squared-error regression through the masked layer with l1 on the mask;
// coordination (when configured) runs once per epoch on the mask update.
PruneTrace train_toy_pruner(MaskedConvLayer& layer, const std::vector<PruneSample>& dataset,
                            const PruneTrainOptions& train,
                            const std::optional<PruneConfig>& cogd);

// Regression task from a ground-truth layer whose upper half of output
// channels is zeroed, so the correct prune set is known.
struct PlantedTask {
    MaskedConvLayer truth;
    MaskedConvLayer init;
    std::vector<PruneSample> dataset;
    std::size_t informative_channels = 0;
};

PlantedTask make_planted_task(std::size_t out_channels, std::size_t in_channels,
                              std::size_t kernel_size, std::size_t image_size,
                              std::size_t num_samples, std::uint64_t seed);

}  // namespace cogd
