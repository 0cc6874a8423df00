#include "cogd/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace cogd {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseVector matvec(const DenseMatrix& a, const DenseVector& x) {
    if (a.cols != x.len())
        throw std::invalid_argument("matvec: dimension mismatch (" + std::to_string(a.cols) +
                                    " cols vs vector length " + std::to_string(x.len()) + ")");
    DenseVector y(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double acc = 0.0;
        const double* row = a.data.data() + i * a.cols;
        for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

ImageGrid conv2d_circular(const ImageGrid& image, const std::vector<double>& kernel,
                          std::size_t kh, std::size_t kw) {
    if (kh > image.height || kw > image.width)
        throw std::invalid_argument("conv2d_circular: kernel larger than image");
    if (kernel.size() != kh * kw)
        throw std::invalid_argument("conv2d_circular: kernel buffer size mismatch");

    const std::size_t h = image.height, w = image.width;
    ImageGrid out(h, w, 0.0, image.range_max);
    // Wrapped source indices, precomputed per (pixel, kernel offset).
    std::vector<std::size_t> ys(h * kh), xs(w * kw);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t u = 0; u < kh; ++u) ys[y * kh + u] = (y + h - (u % h)) % h;
    for (std::size_t x = 0; x < w; ++x)
        for (std::size_t v = 0; v < kw; ++v) xs[x * kw + v] = (x + w - (v % w)) % w;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::size_t u = 0; u < kh; ++u) {
                const double* row = image.pixels.data() + ys[y * kh + u] * w;
                const double* krow = kernel.data() + u * kw;
                const std::size_t* xrow = xs.data() + x * kw;
                for (std::size_t v = 0; v < kw; ++v) acc += krow[v] * row[xrow[v]];
            }
            out.at(y, x) = acc;
        }
    }
    return out;
}

ImageGrid corr2d_circular(const ImageGrid& image, const std::vector<double>& kernel,
                          std::size_t kh, std::size_t kw) {
    if (kh > image.height || kw > image.width)
        throw std::invalid_argument("corr2d_circular: kernel larger than image");
    if (kernel.size() != kh * kw)
        throw std::invalid_argument("corr2d_circular: kernel buffer size mismatch");

    const std::size_t h = image.height, w = image.width;
    ImageGrid out(h, w, 0.0, image.range_max);
    std::vector<std::size_t> ys(h * kh), xs(w * kw);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t u = 0; u < kh; ++u) ys[y * kh + u] = (y + (u % h)) % h;
    for (std::size_t x = 0; x < w; ++x)
        for (std::size_t v = 0; v < kw; ++v) xs[x * kw + v] = (x + (v % w)) % w;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::size_t u = 0; u < kh; ++u) {
                const double* row = image.pixels.data() + ys[y * kh + u] * w;
                const double* krow = kernel.data() + u * kw;
                const std::size_t* xrow = xs.data() + x * kw;
                for (std::size_t v = 0; v < kw; ++v) acc += krow[v] * row[xrow[v]];
            }
            out.at(y, x) = acc;
        }
    }
    return out;
}

std::vector<double> corr2d_block(const ImageGrid& a, const ImageGrid& b, std::size_t kh,
                                 std::size_t kw) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("corr2d_block: dimension mismatch");
    const std::size_t h = a.height, w = a.width;
    std::vector<double> out(kh * kw, 0.0);
    for (std::size_t u = 0; u < kh; ++u)
        for (std::size_t v = 0; v < kw; ++v) {
            double acc = 0.0;
            for (std::size_t y = 0; y < h; ++y) {
                const double* arow = a.pixels.data() + ((y + u) % h) * w;
                const double* brow = b.pixels.data() + y * w;
                for (std::size_t x = 0; x < w; ++x) acc += arow[(x + v) % w] * brow[x];
            }
            out[u * kw + v] = acc;
        }
    return out;
}

double norm(const std::vector<double>& v, NormKind kind) {
    double acc = 0.0;
    if (kind == NormKind::L1) {
        for (double x : v) acc += std::abs(x);
        return acc;
    }
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double norm(const DenseVector& v, NormKind kind) { return norm(v.data, kind); }
double norm(const DenseMatrix& m, NormKind kind) { return norm(m.data, kind); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace cogd
