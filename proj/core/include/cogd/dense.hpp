#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cogd {

// Flat 64-bit real vector. All public operations keep entries finite.
struct DenseVector {
    std::vector<double> data;

    DenseVector() = default;
    explicit DenseVector(std::size_t n, double fill = 0.0) : data(n, fill) {}
    DenseVector(std::initializer_list<double> init) : data(init) {}

    std::size_t len() const { return data.size(); }
    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }
};

// Row-major dense matrix.
struct DenseMatrix {
    std::vector<double> data;
    std::size_t rows = 0;
    std::size_t cols = 0;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : data(r * c, fill), rows(r), cols(c) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static DenseMatrix identity(std::size_t n);
};

// 2-D image with an explicit dynamic range (1.0 or 255.0).
struct ImageGrid {
    std::vector<double> pixels;
    std::size_t height = 0;
    std::size_t width = 0;
    double range_max = 1.0;

    ImageGrid() = default;
    ImageGrid(std::size_t h, std::size_t w, double fill = 0.0, double range = 1.0)
        : pixels(h * w, fill), height(h), width(w), range_max(range) {}

    double& at(std::size_t y, std::size_t x) { return pixels[y * width + x]; }
    double at(std::size_t y, std::size_t x) const { return pixels[y * width + x]; }
    std::size_t size() const { return pixels.size(); }
};

enum class NormKind { L1, L2 };

DenseVector matvec(const DenseMatrix& a, const DenseVector& x);

// Circular (wrap-around) 2-D convolution; output has the input's size.
// Kernel is row-major kh x kw; must fit inside the image.
ImageGrid conv2d_circular(const ImageGrid& image, const std::vector<double>& kernel,
                          std::size_t kh, std::size_t kw);

// Circular 2-D cross-correlation (the adjoint of conv2d_circular).
ImageGrid corr2d_circular(const ImageGrid& image, const std::vector<double>& kernel,
                          std::size_t kh, std::size_t kw);

// Leading kh x kw block of the circular correlation of a with b; this is the
// kernel-shaped gradient of conv2d_circular(b, kernel) against a.
std::vector<double> corr2d_block(const ImageGrid& a, const ImageGrid& b, std::size_t kh,
                                 std::size_t kw);

double norm(const std::vector<double>& v, NormKind kind);
double norm(const DenseVector& v, NormKind kind);
double norm(const DenseMatrix& m, NormKind kind);

double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace cogd
