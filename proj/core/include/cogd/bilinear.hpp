#pragma once

#include <optional>

#include "cogd/dense.hpp"
#include "cogd/optim.hpp"

namespace cogd {

enum class RegAKind { None, L2 };

// min over (A, x) of 1/2 ||b - A x||^2 + lambda ||x||_1 + R(A).
struct BilinearLS {
    DenseMatrix a;
    DenseVector x;
    DenseVector b;
    double lambda = 0.0;
    RegAKind reg_a = RegAKind::None;
    double reg_a_weight = 0.0;

    void check_dims() const;
};

// A x - b.
DenseVector residual_ghat(const BilinearLS& p);

// (Ax - b) x^T (+ regularizer term); exactly the zero matrix when x = 0.
DenseMatrix grad_A(const BilinearLS& p);

// A^T (Ax - b) + lambda * subgrad(||x||_1), subgradient 0 at 0.
DenseVector grad_x(const BilinearLS& p);

double objective(const BilinearLS& p);

// Beale-style toy with an |x1| + x2^2 penalty. c3 keeps the source's literal
// 2.62; the canonical 2.625 is one config away.
struct BealeProblem {
    double x1 = 0.0;
    double x2 = 0.0;
    double c1 = 1.5;
    double c2 = 2.25;
    double c3 = 2.62;
};

double beale_value(const BealeProblem& p);
double beale_constrained_value(const BealeProblem& p);

struct Grad2 {
    double dx1 = 0.0;
    double dx2 = 0.0;
};

// Analytic gradient of the constrained value; d|x1|/dx1 := sign(x1), 0 at 0.
Grad2 beale_constrained_grad(const BealeProblem& p);

struct ToyRunOptions {
    double start_x1 = 1.0;
    double start_x2 = 1.5;
    std::int64_t iters = 200;
    double c3 = 2.62;
};

// Couples x1 (sparse role, |x1| penalty, alpha = 1) with x2 (dense role,
// alpha = 0.5). Trace iterates hold (x1, x2).
OptTrace run_toy(const OptimizerConfig& opt, const std::optional<CoGDConfig>& cogd,
                 const ToyRunOptions& run);

struct BilinearRunOptions {
    std::int64_t iters = 100;
    double eta_a = 0.0;   // 0 means: reuse the optimizer's learning rate
    bool update_a = true;
};

// Alternating descent on A and x; CoGD coordination applied to the x update.
OptTrace run_bilinear_ls(BilinearLS p, const OptimizerConfig& opt,
                         const std::optional<CoGDConfig>& cogd, const BilinearRunOptions& run);

}  // namespace cogd
