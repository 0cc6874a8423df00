#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogd/dense.hpp"
#include "cogd/rng.hpp"

namespace cogd {

// Parse/format failures carry the byte offset of the offending input.
struct PgmError : std::runtime_error {
    std::size_t offset;
    PgmError(const std::string& what, std::size_t off)
        : std::runtime_error(what + " (byte offset " + std::to_string(off) + ")"), offset(off) {}
};

// Binary inpainting mask, entries in {0, 1}.
struct InpaintingMask {
    std::vector<double> grid;
    std::size_t height = 0;
    std::size_t width = 0;
    double keep_fraction = 1.0;

    double at(std::size_t y, std::size_t x) const { return grid[y * width + x]; }
};

// P5 or P2 PGM with maxval <= 255; pixels scaled to [0,1], range_max 1.0.
ImageGrid read_pgm(const std::vector<std::uint8_t>& bytes);
ImageGrid read_pgm_file(const std::string& path);

// Emits P5, maxval 255, rounding half-up, clamped to [0, 255].
std::vector<std::uint8_t> write_pgm(const ImageGrid& img);
void write_pgm_file(const ImageGrid& img, const std::string& path);

// Per-image standardization: mean 0, std 1 (std < 1e-8 guards to divisor 1).
ImageGrid contrast_normalize(const ImageGrid& img);

// I.i.d. Bernoulli(keep_fraction) mask from the counter-based PRNG; masks are
// bit-reproducible given (h, w, keep_fraction, seed).
InpaintingMask make_subsample_mask(std::size_t h, std::size_t w, double keep_fraction,
                                   std::uint64_t seed);

}  // namespace cogd
