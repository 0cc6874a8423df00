#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cogd/dense.hpp"

namespace cogd {

struct QualityEntry {
    std::string name;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

struct QualityReport {
    std::vector<QualityEntry> entries;

    double mean_psnr() const;
    double mean_ssim() const;
    // header: image,psnr_db,ssim ; infinite PSNR serializes as "inf"
    std::string to_csv() const;
};

// 10 log10(range^2 / MSE); +inf for identical images.
double psnr(const ImageGrid& a, const ImageGrid& b);

// Mean local SSIM, 11x11 Gaussian window sigma 1.5, k1=0.01, k2=0.03,
// valid window positions only.
double ssim(const ImageGrid& a, const ImageGrid& b);

}  // namespace cogd
