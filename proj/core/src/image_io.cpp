#include "cogd/image_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

namespace cogd {

namespace {

struct Cursor {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    bool eof() const { return pos >= bytes.size(); }
    std::uint8_t peek() const { return bytes[pos]; }

    void skip_ws_and_comments() {
        while (!eof()) {
            if (std::isspace(peek())) {
                ++pos;
            } else if (peek() == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    // Reads a decimal unsigned integer token.
    std::size_t read_uint(const char* what) {
        skip_ws_and_comments();
        if (eof() || !std::isdigit(peek()))
            throw PgmError(std::string("expected ") + what, pos);
        std::size_t v = 0;
        while (!eof() && std::isdigit(peek())) {
            v = v * 10 + (peek() - '0');
            if (v > 1000000000) throw PgmError(std::string("oversized ") + what, pos);
            ++pos;
        }
        return v;
    }
};

}  // namespace

ImageGrid read_pgm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2) throw PgmError("truncated PGM header", 0);
    const char m0 = static_cast<char>(bytes[0]);
    const char m1 = static_cast<char>(bytes[1]);
    if (m0 != 'P' || (m1 != '2' && m1 != '5')) {
        throw PgmError(std::string("unsupported format \"") + m0 + m1 +
                           "\" (only P2/P5 PGM supported)",
                       0);
    }
    const bool binary = m1 == '5';
    Cursor cur{bytes, 2};
    const std::size_t w = cur.read_uint("width");
    const std::size_t h = cur.read_uint("height");
    const std::size_t maxval = cur.read_uint("maxval");
    if (w == 0 || h == 0) throw PgmError("zero image dimension", cur.pos);
    if (maxval == 0 || maxval > 255) throw PgmError("maxval out of range (1..255)", cur.pos);

    ImageGrid img(h, w, 0.0, 1.0);
    if (binary) {
        // Exactly one whitespace byte separates the header from the payload.
        if (cur.eof() || !std::isspace(cur.peek()))
            throw PgmError("missing header/payload separator", cur.pos);
        ++cur.pos;
        if (bytes.size() - cur.pos < h * w)
            throw PgmError("truncated P5 payload", bytes.size());
        for (std::size_t i = 0; i < h * w; ++i)
            img.pixels[i] = static_cast<double>(bytes[cur.pos + i]) / static_cast<double>(maxval);
    } else {
        for (std::size_t i = 0; i < h * w; ++i) {
            const std::size_t v = cur.read_uint("pixel value");
            if (v > maxval) throw PgmError("pixel value above maxval", cur.pos);
            img.pixels[i] = static_cast<double>(v) / static_cast<double>(maxval);
        }
    }
    return img;
}

ImageGrid read_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return read_pgm(bytes);
}

std::vector<std::uint8_t> write_pgm(const ImageGrid& img) {
    std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                         "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + img.size());
    for (double p : img.pixels) {
        double v = std::floor(p / img.range_max * 255.0 + 0.5);
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
}

void write_pgm_file(const ImageGrid& img, const std::string& path) {
    auto bytes = write_pgm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

ImageGrid contrast_normalize(const ImageGrid& img) {
    const double n = static_cast<double>(img.size());
    double mean = 0.0;
    for (double p : img.pixels) mean += p;
    mean /= n;
    double var = 0.0;
    for (double p : img.pixels) {
        const double d = p - mean;
        var += d * d;
    }
    const double sd = std::sqrt(var / n);
    const double div = sd < 1e-8 ? 1.0 : sd;
    ImageGrid out = img;
    for (double& p : out.pixels) p = (p - mean) / div;
    return out;
}

InpaintingMask make_subsample_mask(std::size_t h, std::size_t w, double keep_fraction,
                                   std::uint64_t seed) {
    if (keep_fraction <= 0.0 || keep_fraction > 1.0)
        throw std::invalid_argument("make_subsample_mask: keep_fraction must be in (0,1]");
    InpaintingMask mask;
    mask.height = h;
    mask.width = w;
    mask.keep_fraction = keep_fraction;
    mask.grid.resize(h * w);
    CounterRng rng = CounterRng(seed).split("mask");
    for (std::size_t i = 0; i < h * w; ++i)
        mask.grid[i] = rng.next_double() < keep_fraction ? 1.0 : 0.0;
    return mask;
}

}  // namespace cogd
