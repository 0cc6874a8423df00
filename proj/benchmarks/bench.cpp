#include <benchmark/benchmark.h>

#include "cogd/csc.hpp"
#include "cogd/dense.hpp"
#include "cogd/rng.hpp"

namespace {

cogd::ImageGrid random_image(std::size_t n, std::uint64_t seed) {
    cogd::CounterRng rng(seed);
    cogd::ImageGrid img;
    img.height = img.width = n;
    img.pixels.resize(n * n);
    for (double& p : img.pixels) p = rng.next_double();
    return img;
}

void bm_conv2d_circular(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    cogd::ImageGrid img = random_image(n, 1);
    std::vector<double> kernel(11 * 11, 0.01);
    for (auto _ : state) {
        auto out = cogd::conv2d_circular(img, kernel, 11, 11);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(bm_conv2d_circular)->Arg(64)->Arg(128);

void bm_soft_threshold(benchmark::State& state) {
    cogd::ImageGrid img = random_image(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        cogd::ImageGrid copy = img;
        cogd::soft_threshold(copy.pixels, 0.05);
        benchmark::DoNotOptimize(copy);
    }
}
BENCHMARK(bm_soft_threshold)->Arg(64)->Arg(256);

void bm_code_update(benchmark::State& state) {
    const std::size_t n = 64;
    cogd::ImageGrid img = random_image(n, 3);
    cogd::CounterRng rng(4);
    cogd::FilterBank bank;
    bank.k = 11;
    bank.filters.resize(8);
    for (auto& f : bank.filters) {
        f.resize(11 * 11);
        for (double& v : f) v = rng.next_normal();
        double nrm = cogd::norm(f, cogd::NormKind::L2);
        for (double& v : f) v /= nrm;
    }
    cogd::CodeMaps codes;
    codes.lambda = 0.05;
    codes.maps.assign(bank.filters.size(), cogd::ImageGrid(n, n));
    cogd::AdmmState admm;
    for (auto _ : state) {
        auto out = cogd::code_update(bank, codes, img, nullptr, admm, 5);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(bm_code_update);

}  // namespace

BENCHMARK_MAIN();
