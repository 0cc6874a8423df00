#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>

#include "cogd/metrics.hpp"
#include "cogd/rng.hpp"

using namespace cogd;

TEST_CASE("psnr of identical images is positive infinity") {
    ImageGrid a(4, 4, 0.5);
    CHECK(std::isinf(psnr(a, a)));
    CHECK(psnr(a, a) > 0);
}

TEST_CASE("psnr against a hand-computed mse") {
    // uniform diff 0.1 on range 1: mse = 0.01, psnr = 10 log10(1/0.01) = 20
    ImageGrid a(4, 4, 0.5);
    ImageGrid b(4, 4, 0.6);
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("psnr respects the dynamic range") {
    ImageGrid a(4, 4, 100.0, 255.0);
    ImageGrid b(4, 4, 110.0, 255.0);
    // mse = 100, psnr = 10 log10(255^2 / 100)
    CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(255.0 * 255.0 / 100.0)).epsilon(1e-12));
}

TEST_CASE("psnr rejects shape and range mismatches") {
    ImageGrid a(4, 4, 0.5);
    ImageGrid b(4, 5, 0.5);
    CHECK_THROWS_AS(psnr(a, b), std::invalid_argument);
    ImageGrid c(4, 4, 0.5, 255.0);
    CHECK_THROWS_AS(psnr(a, c), std::invalid_argument);
}

TEST_CASE("ssim of an image with itself is one") {
    CounterRng rng(601);
    ImageGrid a(16, 16);
    for (double& p : a.pixels) p = rng.next_double();
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim on constant images matches the closed form") {
    // zero variance: ssim = (2 mu1 mu2 + c1) / (mu1^2 + mu2^2 + c1)
    ImageGrid a(16, 16, 0.5);
    ImageGrid b(16, 16, 0.25);
    CHECK(ssim(a, b) == doctest::Approx(0.8000639795265515).epsilon(1e-12));
}

TEST_CASE("ssim decreases with noise") {
    CounterRng rng(611);
    ImageGrid a(32, 32);
    for (double& p : a.pixels) p = rng.next_double();
    ImageGrid small = a, big = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double n = rng.next_normal();
        small.pixels[i] += 0.01 * n;
        big.pixels[i] += 0.2 * n;
    }
    double s_small = ssim(a, small);
    double s_big = ssim(a, big);
    CHECK(s_small > s_big);
    CHECK(s_small > 0.9);
    CHECK(s_small < 1.0);
}

TEST_CASE("ssim is symmetric") {
    CounterRng rng(621);
    ImageGrid a(16, 16), b(16, 16);
    for (double& p : a.pixels) p = rng.next_double();
    for (double& p : b.pixels) p = rng.next_double();
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
}

TEST_CASE("ssim needs at least the window size") {
    ImageGrid a(8, 8, 0.5);
    CHECK_THROWS_AS(ssim(a, a), std::invalid_argument);
}

TEST_CASE("quality report csv serializes infinity as inf") {
    QualityReport r;
    r.entries.push_back({"one", std::numeric_limits<double>::infinity(), 1.0});
    r.entries.push_back({"two", 20.0, 0.5});
    CHECK(r.to_csv() == "image,psnr_db,ssim\none,inf,1\ntwo,20,0.5\n");
    CHECK(std::isinf(r.mean_psnr()));
    CHECK(r.mean_ssim() == doctest::Approx(0.75).epsilon(1e-15));
}
