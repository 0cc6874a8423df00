#include "cogd/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cogd/optim.hpp"  // format_double

namespace cogd {

double QualityReport::mean_psnr() const {
    if (entries.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& e : entries) acc += e.psnr_db;
    return acc / static_cast<double>(entries.size());
}

double QualityReport::mean_ssim() const {
    if (entries.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& e : entries) acc += e.ssim;
    return acc / static_cast<double>(entries.size());
}

std::string QualityReport::to_csv() const {
    std::string out = "image,psnr_db,ssim\n";
    for (const auto& e : entries) {
        out += e.name;
        out += ',';
        out += format_double(e.psnr_db);
        out += ',';
        out += format_double(e.ssim);
        out += '\n';
    }
    return out;
}

double psnr(const ImageGrid& a, const ImageGrid& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("psnr: dimension mismatch");
    if (a.range_max != b.range_max)
        throw std::invalid_argument("psnr: range_max mismatch");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(a.range_max * a.range_max / mse);
}

namespace {

constexpr std::size_t kWin = 11;
constexpr double kSigma = 1.5;

std::vector<double> gaussian_window() {
    std::vector<double> w(kWin * kWin);
    const double c = (kWin - 1) / 2.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < kWin; ++i)
        for (std::size_t j = 0; j < kWin; ++j) {
            const double dy = static_cast<double>(i) - c;
            const double dx = static_cast<double>(j) - c;
            w[i * kWin + j] = std::exp(-(dy * dy + dx * dx) / (2.0 * kSigma * kSigma));
            sum += w[i * kWin + j];
        }
    for (double& v : w) v /= sum;
    return w;
}

}  // namespace

double ssim(const ImageGrid& a, const ImageGrid& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("ssim: dimension mismatch");
    if (a.height < kWin || a.width < kWin)
        throw std::invalid_argument("ssim: image smaller than 11x11 window");

    static const std::vector<double> win = gaussian_window();
    const double l = a.range_max;
    const double c1 = (0.01 * l) * (0.01 * l);
    const double c2 = (0.03 * l) * (0.03 * l);

    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t y = 0; y + kWin <= a.height; ++y) {
        for (std::size_t x = 0; x + kWin <= a.width; ++x) {
            double mu_a = 0.0, mu_b = 0.0;
            for (std::size_t i = 0; i < kWin; ++i)
                for (std::size_t j = 0; j < kWin; ++j) {
                    const double w = win[i * kWin + j];
                    mu_a += w * a.at(y + i, x + j);
                    mu_b += w * b.at(y + i, x + j);
                }
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (std::size_t i = 0; i < kWin; ++i)
                for (std::size_t j = 0; j < kWin; ++j) {
                    const double w = win[i * kWin + j];
                    const double da = a.at(y + i, x + j) - mu_a;
                    const double db = b.at(y + i, x + j) - mu_b;
                    var_a += w * da * da;
                    var_b += w * db * db;
                    cov += w * da * db;
                }
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            acc += num / den;
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

}  // namespace cogd
