#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "cogd/prune.hpp"
#include "cogd/rng.hpp"

using namespace cogd;

namespace {

MaskedConvLayer random_layer(std::size_t in_c, std::size_t out_c, std::size_t k,
                             std::uint64_t seed) {
    CounterRng rng(seed);
    MaskedConvLayer layer;
    layer.in_channels = in_c;
    layer.out_channels = out_c;
    layer.kernel_size = k;
    layer.weights.resize(in_c * out_c);
    for (auto& w : layer.weights) {
        w.resize(k * k);
        for (double& v : w) v = rng.next_normal();
    }
    layer.mask = DenseVector(out_c);
    for (std::size_t j = 0; j < out_c; ++j) layer.mask[j] = 0.5 + rng.next_double();
    return layer;
}

std::vector<ImageGrid> random_maps(std::size_t count, std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<ImageGrid> out;
    for (std::size_t i = 0; i < count; ++i) {
        ImageGrid img(n, n);
        for (double& p : img.pixels) p = rng.next_normal();
        out.push_back(std::move(img));
    }
    return out;
}

double sq_loss(const MaskedConvLayer& layer, const std::vector<ImageGrid>& input,
               const std::vector<ImageGrid>& target) {
    std::vector<ImageGrid> out = masked_forward(layer, input);
    double loss = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j)
        for (std::size_t i = 0; i < out[j].size(); ++i) {
            double d = out[j].pixels[i] - target[j].pixels[i];
            loss += 0.5 * d * d;
        }
    return loss;
}

}  // namespace

TEST_CASE("masked forward matches per-channel convolution sums") {
    MaskedConvLayer layer = random_layer(2, 3, 3, 501);
    std::vector<ImageGrid> input = random_maps(2, 6, 502);
    std::vector<ImageGrid> out = masked_forward(layer, input);
    REQUIRE(out.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        ImageGrid want(6, 6);
        for (std::size_t i = 0; i < 2; ++i) {
            std::vector<double> scaled = layer.w(i, j);
            for (double& v : scaled) v *= layer.mask[j];
            ImageGrid c = conv2d_circular(input[i], scaled, 3, 3);
            for (std::size_t p = 0; p < want.size(); ++p) want.pixels[p] += c.pixels[p];
        }
        for (std::size_t p = 0; p < want.size(); ++p)
            CHECK(out[j].pixels[p] == doctest::Approx(want.pixels[p]).epsilon(1e-12));
    }
}

TEST_CASE("relu activation clips negative responses") {
    MaskedConvLayer layer = random_layer(1, 1, 3, 511);
    layer.activation = Activation::Relu;
    std::vector<ImageGrid> out = masked_forward(layer, random_maps(1, 6, 512));
    for (double v : out[0].pixels) CHECK(v >= 0.0);
}

TEST_CASE("weight and mask gradients agree with central differences") {
    MaskedConvLayer layer = random_layer(2, 2, 3, 521);
    std::vector<ImageGrid> input = random_maps(2, 6, 522);
    std::vector<ImageGrid> target = random_maps(2, 6, 523);

    // upstream = d loss / d output = output - target
    std::vector<ImageGrid> out = masked_forward(layer, input);
    std::vector<ImageGrid> upstream;
    for (std::size_t j = 0; j < out.size(); ++j) {
        ImageGrid u(6, 6);
        for (std::size_t p = 0; p < u.size(); ++p)
            u.pixels[p] = out[j].pixels[p] - target[j].pixels[p];
        upstream.push_back(std::move(u));
    }

    const double h = 1e-6;
    std::vector<std::vector<double>> gw = grad_W(layer, input, upstream);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t p = 0; p < 9; ++p) {
                MaskedConvLayer q = layer;
                q.w(i, j)[p] += h;
                double fp = sq_loss(q, input, target);
                q.w(i, j)[p] = layer.w(i, j)[p] - h;
                double fm = sq_loss(q, input, target);
                double num = (fp - fm) / (2 * h);
                CHECK(std::abs(gw[i * 2 + j][p] - num) <= 1e-5 * std::max(1.0, std::abs(num)));
            }

    DenseVector gm = grad_mask(layer, input, upstream);
    for (std::size_t j = 0; j < 2; ++j) {
        MaskedConvLayer q = layer;
        q.mask[j] += h;
        double fp = sq_loss(q, input, target);
        q.mask[j] = layer.mask[j] - h;
        double fm = sq_loss(q, input, target);
        double num = (fp - fm) / (2 * h);
        CHECK(std::abs(gm[j] - num) <= 1e-5 * std::max(1.0, std::abs(num)));
    }
}

TEST_CASE("weight gradient vanishes exactly on a zero-mask channel") {
    MaskedConvLayer layer = random_layer(2, 2, 3, 531);
    layer.mask[1] = 0.0;
    std::vector<ImageGrid> input = random_maps(2, 6, 532);
    std::vector<ImageGrid> upstream = random_maps(2, 6, 533);
    std::vector<std::vector<double>> gw = grad_W(layer, input, upstream);
    for (std::size_t i = 0; i < 2; ++i) {
        for (double v : gw[i * 2 + 1]) CHECK(v == 0.0);
        bool live = false;
        for (double v : gw[i * 2 + 0]) live = live || v != 0.0;
        CHECK(live);
    }
}

TEST_CASE("upstream recovery is invariant to the mask scale") {
    CounterRng rng(541);
    std::vector<double> ghat(9);
    for (double& v : ghat) v = rng.next_normal();
    for (double m : {0.01, 0.1, 1.0, 10.0}) {
        std::vector<double> grad(9);
        for (std::size_t i = 0; i < 9; ++i) grad[i] = m * ghat[i];
        std::vector<double> rec = recover_ghat(grad, m, 1e-8);
        for (std::size_t i = 0; i < 9; ++i)
            CHECK(std::abs(rec[i] - ghat[i]) <= 1e-9);
    }
}

TEST_CASE("recovery guards tiny masks by clamping with the original sign") {
    std::vector<double> grad{2e-8};
    CHECK(recover_ghat(grad, 0.0, 1e-8)[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(recover_ghat(grad, -1e-12, 1e-8)[0] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(recover_ghat(grad, 1e-12, 1e-8)[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("channel norm threshold interpolates the requested quantile") {
    std::vector<double> norms{4.0, 1.0, 3.0, 2.0};
    // a = 0.5 with an even count -> the median 2.5
    CHECK(alpha_w_threshold(norms, 0.5) == doctest::Approx(2.5).epsilon(1e-12));
    // a = 0.25: three quarters below, threshold between 3 and 4
    CHECK(alpha_w_threshold(norms, 0.25) > 3.0);
    CHECK(alpha_w_threshold(norms, 0.25) < 4.0);
    CHECK_THROWS_AS(alpha_w_threshold({}, 0.5), std::invalid_argument);
}

TEST_CASE("mask coordination is a bitwise pass-through at beta_scale zero") {
    MaskedConvLayer layer = random_layer(1, 2, 3, 551);
    PruneConfig cfg;
    cfg.beta_scale = 0.0;
    DenseVector m_next{-0.0, 0.7};
    DenseVector m_prev{0.4, 0.6};
    std::vector<std::vector<double>> ghat(2, std::vector<double>(9, 1.0));
    std::vector<std::vector<double>> dw(2, std::vector<double>(9, 0.1));
    DenseVector dm{0.1, 0.1};
    std::vector<bool> fired;
    DenseVector out = mask_cogd_update(m_next, m_prev, layer, ghat, dw, dm, cfg, 1.0, &fired);
    CHECK(out.data == m_next.data);
    for (bool f : fired) CHECK_FALSE(f);
}

TEST_CASE("mask coordination fires on quiet-mask loud-filter channels only") {
    MaskedConvLayer layer = random_layer(1, 2, 3, 561);
    // force channel norms: channel 0 small, channel 1 large
    for (double& v : layer.w(0, 0)) v = 0.01;
    for (double& v : layer.w(0, 1)) v = 10.0;
    PruneConfig cfg;  // alpha_m = 0.5, a = 0.5
    DenseVector m_next{0.3, 0.3};
    DenseVector m_prev{0.2, 0.2};  // both quiet; only channel 1 is above alpha_W
    std::vector<std::vector<double>> ghat(2, std::vector<double>(9, 1.0));
    std::vector<std::vector<double>> dw(2, std::vector<double>(9, 0.2));
    DenseVector dm{0.1, 0.1};
    std::vector<bool> fired;
    DenseVector out = mask_cogd_update(m_next, m_prev, layer, ghat, dw, dm, cfg, 1.0, &fired);
    REQUIRE(fired.size() == 2);
    CHECK_FALSE(fired[0]);
    CHECK(fired[1]);
    CHECK(out[0] == m_next[0]);
    // c_1 = sum_i ghat * (dw/dm) = 9 * (0.2/0.1) = 18; beta = 0.001*1*18
    CHECK(out[1] == doctest::Approx(0.3 + 0.018 * 0.2).epsilon(1e-12));
}

TEST_CASE("planted task zeroes the upper half of truth channels") {
    PlantedTask task = make_planted_task(8, 2, 3, 8, 4, 17);
    CHECK(task.informative_channels == 4);
    for (std::size_t j = 0; j < 8; ++j)
        CHECK(task.truth.mask[j] == (j < 4 ? 1.0 : 0.0));
    REQUIRE(task.dataset.size() == 4);
    // targets really are the truth layer's response
    std::vector<ImageGrid> want = masked_forward(task.truth, task.dataset[0].input);
    for (std::size_t j = 0; j < want.size(); ++j)
        CHECK(task.dataset[0].target[j].pixels == want[j].pixels);
    // dead-channel targets are exactly zero
    for (const auto& s : task.dataset)
        for (std::size_t j = 4; j < 8; ++j)
            for (double v : s.target[j].pixels) CHECK(v == 0.0);
}

TEST_CASE("planted task is reproducible per seed") {
    PlantedTask a = make_planted_task(8, 2, 3, 8, 4, 23);
    PlantedTask b = make_planted_task(8, 2, 3, 8, 4, 23);
    PlantedTask c = make_planted_task(8, 2, 3, 8, 4, 24);
    CHECK(a.init.weights == b.init.weights);
    CHECK(a.init.weights != c.init.weights);
}

TEST_CASE("training reduces the loss and logs every epoch") {
    PlantedTask task = make_planted_task(4, 1, 3, 6, 3, 29);
    MaskedConvLayer layer = task.init;
    PruneTrainOptions train;
    train.epochs = 60;
    train.learning_rate = 0.002;
    PruneConfig cfg;
    cfg.beta_scale = 0.0;
    PruneTrace trace = train_toy_pruner(layer, task.dataset, train, cfg);
    REQUIRE(trace.epochs.size() == 60);
    CHECK(trace.epochs.back().loss < trace.epochs.front().loss);
    for (const auto& e : trace.epochs) {
        CHECK(e.mask_values.size() == 4);
        CHECK(e.filter_norms.size() == 4);
    }
}

TEST_CASE("trace csv and pruned report formats") {
    PruneTrace trace;
    PruneEpochRecord rec;
    rec.epoch = 0;
    rec.mask_values = {0.5, 0.01};
    rec.filter_norms = {1.0, 2.0};
    rec.detector_fired = {false, true};
    rec.async_channels = {false, true};
    trace.epochs.push_back(rec);
    CHECK(trace.to_csv() ==
          "epoch,channel,mask_value,filter_norm,detector_fired\n"
          "0,0,0.5,1,0\n0,1,0.01,2,1\n");
    std::string report = trace.pruned_report(0.1);
    CHECK(report.find("channel 0: kept") != std::string::npos);
    CHECK(report.find("channel 1: pruned") != std::string::npos);
}
