#include "cogd/prune.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cogd/rng.hpp"

namespace cogd {

std::vector<double> MaskedConvLayer::channel_norms() const {
    const std::size_t ksz = kernel_size * kernel_size;
    std::vector<double> out(out_channels, 0.0);
    for (std::size_t j = 0; j < out_channels; ++j) {
        std::vector<double> summed(ksz, 0.0);
        for (std::size_t i = 0; i < in_channels; ++i)
            for (std::size_t q = 0; q < ksz; ++q) summed[q] += w(i, j)[q];
        out[j] = norm(summed, NormKind::L2);
    }
    return out;
}

std::vector<ImageGrid> masked_forward(const MaskedConvLayer& layer,
                                      const std::vector<ImageGrid>& inputs) {
    if (inputs.size() != layer.in_channels)
        throw std::invalid_argument("masked_forward: input channel count mismatch");
    if (layer.mask.len() != layer.out_channels)
        throw std::invalid_argument("masked_forward: mask length mismatch");
    const std::size_t k = layer.kernel_size;
    std::vector<ImageGrid> out(layer.out_channels,
                               ImageGrid(inputs[0].height, inputs[0].width));
    std::vector<double> scaled(k * k);
    for (std::size_t j = 0; j < layer.out_channels; ++j) {
        for (std::size_t i = 0; i < layer.in_channels; ++i) {
            const auto& wij = layer.w(i, j);
            for (std::size_t q = 0; q < scaled.size(); ++q) scaled[q] = wij[q] * layer.mask[j];
            ImageGrid c = conv2d_circular(inputs[i], scaled, k, k);
            for (std::size_t p = 0; p < c.size(); ++p) out[j].pixels[p] += c.pixels[p];
        }
        if (layer.activation == Activation::Relu)
            for (double& p : out[j].pixels) p = std::max(p, 0.0);
    }
    return out;
}

std::vector<std::vector<double>> grad_W(const MaskedConvLayer& layer,
                                        const std::vector<ImageGrid>& inputs,
                                        const std::vector<ImageGrid>& upstream) {
    if (inputs.size() != layer.in_channels || upstream.size() != layer.out_channels)
        throw std::invalid_argument("grad_W: channel count mismatch");
    const std::size_t k = layer.kernel_size;
    std::vector<std::vector<double>> out(layer.in_channels * layer.out_channels);
    for (std::size_t i = 0; i < layer.in_channels; ++i)
        for (std::size_t j = 0; j < layer.out_channels; ++j) {
            std::vector<double> g = corr2d_block(upstream[j], inputs[i], k, k);
            for (double& v : g) v *= layer.mask[j];
            out[i * layer.out_channels + j] = std::move(g);
        }
    return out;
}

DenseVector grad_mask(const MaskedConvLayer& layer, const std::vector<ImageGrid>& inputs,
                      const std::vector<ImageGrid>& upstream) {
    const std::size_t k = layer.kernel_size;
    DenseVector g(layer.out_channels);
    for (std::size_t j = 0; j < layer.out_channels; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < layer.in_channels; ++i) {
            ImageGrid c = conv2d_circular(inputs[i], layer.w(i, j), k, k);
            for (std::size_t p = 0; p < c.size(); ++p) acc += upstream[j].pixels[p] * c.pixels[p];
        }
        g[j] = acc;
    }
    return g;
}

std::vector<double> recover_ghat(const std::vector<double>& grad_w_ij, double m_j, double eps) {
    const double s = m_j < 0.0 ? -1.0 : 1.0;
    const double denom = s * std::max(std::abs(m_j), eps);
    std::vector<double> out = grad_w_ij;
    for (double& v : out) v /= denom;
    return out;
}

double alpha_w_threshold(const std::vector<double>& channel_norms, double a) {
    if (a <= 0.0 || a >= 1.0)
        throw std::invalid_argument("alpha_w_threshold: a must be in (0,1)");
    if (channel_norms.empty())
        throw std::invalid_argument("alpha_w_threshold: no channel norms");
    std::vector<double> sorted = channel_norms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    // Threshold below which (1-a) of the channels fall; with a = 0.5 and an
    // even count this is the median.
    const double pos = (1.0 - a) * static_cast<double>(n) - 0.5;
    if (pos <= 0.0) return sorted.front();
    if (pos >= static_cast<double>(n - 1)) return sorted.back();
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

DenseVector mask_cogd_update(const DenseVector& m_next, const DenseVector& m_prev,
                             const MaskedConvLayer& layer,
                             const std::vector<std::vector<double>>& ghat,
                             const std::vector<std::vector<double>>& delta_w,
                             const DenseVector& delta_m, const PruneConfig& cfg, double eta,
                             std::vector<bool>* fired) {
    const std::size_t nj = layer.out_channels;
    if (m_next.len() != nj || m_prev.len() != nj || delta_m.len() != nj)
        throw std::invalid_argument("mask_cogd_update: length mismatch");

    const std::vector<double> norms = layer.channel_norms();
    const double alpha_w = alpha_w_threshold(norms, cfg.prune_rate_a);

    DenseVector out = m_next;
    if (fired) fired->assign(nj, false);
    if (cfg.beta_scale == 0.0) return out;

    for (std::size_t j = 0; j < nj; ++j) {
        const bool s_m = std::abs(m_prev[j]) > cfg.alpha_m;
        const bool s_w = norms[j] > alpha_w;
        if (s_m || !s_w) continue;
        if (fired) (*fired)[j] = true;

        double c = 0.0;
        const bool degenerate = std::abs(delta_m[j]) < cfg.fd_eps;
        for (std::size_t i = 0; i < layer.in_channels; ++i) {
            const auto& g = ghat[i * nj + j];
            const auto& dw = delta_w[i * nj + j];
            for (std::size_t q = 0; q < g.size(); ++q)
                c += g[q] * (degenerate ? 1.0 : dw[q] / delta_m[j]);
        }
        out[j] += cfg.beta_scale * eta * c * m_prev[j];
    }
    return out;
}

std::string PruneTrace::to_csv() const {
    std::string out = "epoch,channel,mask_value,filter_norm,detector_fired\n";
    for (const auto& e : epochs)
        for (std::size_t j = 0; j < e.mask_values.size(); ++j) {
            out += std::to_string(e.epoch);
            out += ',';
            out += std::to_string(j);
            out += ',';
            out += format_double(e.mask_values[j]);
            out += ',';
            out += format_double(e.filter_norms[j]);
            out += ',';
            out += e.detector_fired[j] ? '1' : '0';
            out += '\n';
        }
    return out;
}

std::string PruneTrace::pruned_report(double threshold) const {
    if (epochs.empty()) return "";
    const auto& last = epochs.back();
    std::string out;
    for (std::size_t j = 0; j < last.mask_values.size(); ++j) {
        out += "channel " + std::to_string(j) + ": ";
        out += std::abs(last.mask_values[j]) < threshold ? "pruned" : "kept";
        out += '\n';
    }
    return out;
}

PruneTrace train_toy_pruner(MaskedConvLayer& layer, const std::vector<PruneSample>& dataset,
                            const PruneTrainOptions& train,
                            const std::optional<PruneConfig>& cogd) {
    if (dataset.empty()) throw std::invalid_argument("train_toy_pruner: empty dataset");
    const std::size_t nj = layer.out_channels;
    const std::size_t ksz = layer.kernel_size * layer.kernel_size;
    const double eta = train.learning_rate;
    // Mean squared error over samples, channels, and pixels keeps the mask
    // and weight curvatures on comparable scales across problem sizes.
    const std::size_t pix = dataset[0].target.empty() ? 1 : dataset[0].target[0].size();
    const double inv_n = 1.0 / (static_cast<double>(dataset.size()) *
                                static_cast<double>(nj) * static_cast<double>(pix));

    PruneTrace trace;
    std::vector<std::vector<double>> w_prev = layer.weights;
    DenseVector m_prev = layer.mask;
    bool have_prev = false;

    for (std::int64_t epoch = 0; epoch < train.epochs; ++epoch) {
        // Full-batch gradients of the mean squared-error loss.
        std::vector<std::vector<double>> gw(layer.weights.size(),
                                            std::vector<double>(ksz, 0.0));
        DenseVector gm(nj);
        double loss = 0.0;
        for (const auto& sample : dataset) {
            std::vector<ImageGrid> out = masked_forward(layer, sample.input);
            std::vector<ImageGrid> upstream(nj);
            for (std::size_t j = 0; j < nj; ++j) {
                upstream[j] = out[j];
                for (std::size_t p = 0; p < out[j].size(); ++p) {
                    const double d = out[j].pixels[p] - sample.target[j].pixels[p];
                    upstream[j].pixels[p] = d * inv_n;
                    loss += 0.5 * d * d * inv_n;
                }
                if (layer.activation == Activation::Relu)
                    for (std::size_t p = 0; p < out[j].size(); ++p)
                        if (out[j].pixels[p] <= 0.0) upstream[j].pixels[p] = 0.0;
            }
            auto gws = grad_W(layer, sample.input, upstream);
            for (std::size_t q = 0; q < gw.size(); ++q)
                for (std::size_t r = 0; r < ksz; ++r) gw[q][r] += gws[q][r];
            DenseVector gms = grad_mask(layer, sample.input, upstream);
            for (std::size_t j = 0; j < nj; ++j) gm[j] += gms[j];
        }

        // Regularizer subgradients.
        const std::optional<PruneConfig>& pc = cogd;
        const double lambda_m = pc ? pc->lambda_m : PruneConfig{}.lambda_m;
        for (std::size_t j = 0; j < nj; ++j)
            gm[j] += lambda_m * (layer.mask[j] > 0.0 ? 1.0 : (layer.mask[j] < 0.0 ? -1.0 : 0.0));
        if (train.weight_decay > 0.0)
            for (std::size_t q = 0; q < gw.size(); ++q)
                for (std::size_t r = 0; r < ksz; ++r)
                    gw[q][r] += train.weight_decay * layer.weights[q][r];

        const std::vector<std::vector<double>> w_t = layer.weights;
        const DenseVector m_t = layer.mask;

        DenseVector m_next = layer.mask;
        for (std::size_t j = 0; j < nj; ++j) m_next[j] -= eta * gm[j];

        std::vector<bool> fired(nj, false);
        if (cogd && have_prev) {
            std::vector<std::vector<double>> ghat(layer.weights.size());
            std::vector<std::vector<double>> dw(layer.weights.size());
            for (std::size_t i = 0; i < layer.in_channels; ++i)
                for (std::size_t j = 0; j < nj; ++j) {
                    const std::size_t q = i * nj + j;
                    ghat[q] = recover_ghat(gw[q], layer.mask[j], cogd->mask_div_eps);
                    dw[q].resize(ksz);
                    for (std::size_t r = 0; r < ksz; ++r) dw[q][r] = w_t[q][r] - w_prev[q][r];
                }
            DenseVector dm(nj);
            for (std::size_t j = 0; j < nj; ++j) dm[j] = m_t[j] - m_prev[j];
            m_next = mask_cogd_update(m_next, m_t, layer, ghat, dw, dm, *cogd, eta, &fired);
        }

        for (std::size_t q = 0; q < layer.weights.size(); ++q)
            for (std::size_t r = 0; r < ksz; ++r) layer.weights[q][r] -= eta * gw[q][r];
        layer.mask = m_next;

        w_prev = w_t;
        m_prev = m_t;
        have_prev = true;

        PruneEpochRecord rec;
        rec.epoch = epoch;
        rec.mask_values.assign(layer.mask.data.begin(), layer.mask.data.end());
        rec.filter_norms = layer.channel_norms();
        rec.detector_fired = fired;
        rec.loss = loss;
        const double alpha_m = pc ? pc->alpha_m : PruneConfig{}.alpha_m;
        const double rate_a = pc ? pc->prune_rate_a : PruneConfig{}.prune_rate_a;
        const double alpha_w = alpha_w_threshold(rec.filter_norms, rate_a);
        rec.async_channels.resize(nj);
        for (std::size_t j = 0; j < nj; ++j)
            rec.async_channels[j] =
                std::abs(layer.mask[j]) <= alpha_m && rec.filter_norms[j] > alpha_w;
        trace.epochs.push_back(std::move(rec));
    }
    return trace;
}

PlantedTask make_planted_task(std::size_t out_channels, std::size_t in_channels,
                              std::size_t kernel_size, std::size_t image_size,
                              std::size_t num_samples, std::uint64_t seed) {
    PlantedTask task;
    task.informative_channels = out_channels / 2;

    CounterRng rng = CounterRng(seed).split("planted");
    auto make_layer = [&](double weight_scale) {
        MaskedConvLayer layer;
        layer.in_channels = in_channels;
        layer.out_channels = out_channels;
        layer.kernel_size = kernel_size;
        layer.weights.assign(in_channels * out_channels,
                             std::vector<double>(kernel_size * kernel_size));
        // All-positive kernels: every learning channel's norm then grows
        // from the first epoch, instead of dipping while it reorients.
        for (auto& w : layer.weights)
            for (double& v : w) v = std::abs(rng.next_normal());
        // Uniform channel norms: every output channel starts at exactly
        // weight_scale * sqrt(k^2 * in), so norm thresholds separate learned
        // structure instead of initialization luck.
        const double target =
            weight_scale * std::sqrt(static_cast<double>(kernel_size * kernel_size) *
                                     static_cast<double>(in_channels));
        std::vector<double> norms = layer.channel_norms();
        for (std::size_t j = 0; j < out_channels; ++j) {
            const double s = target / norms[j];
            for (std::size_t i = 0; i < in_channels; ++i)
                for (double& v : layer.w(i, j)) v *= s;
        }
        layer.mask = DenseVector(out_channels, 1.0);
        return layer;
    };

    task.truth = make_layer(1.2);
    // Upper half of the output channels carries no signal.
    for (std::size_t j = task.informative_channels; j < out_channels; ++j)
        task.truth.mask[j] = 0.0;

    // Start below the truth/mask equilibrium scale: channels that learn will
    // outgrow the frozen norms of channels whose masks collapse.
    task.init = make_layer(0.3);
    task.init.mask = DenseVector(out_channels, 1.0);

    for (std::size_t s = 0; s < num_samples; ++s) {
        PruneSample sample;
        sample.input.assign(in_channels, ImageGrid(image_size, image_size));
        for (auto& img : sample.input)
            for (double& p : img.pixels) p = rng.next_normal();
        sample.target = masked_forward(task.truth, sample.input);
        task.dataset.push_back(std::move(sample));
    }
    return task;
}

}  // namespace cogd
