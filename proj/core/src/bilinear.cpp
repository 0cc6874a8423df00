#include "cogd/bilinear.hpp"

#include <cmath>
#include <stdexcept>

namespace cogd {

void BilinearLS::check_dims() const {
    if (a.cols != x.len() || a.rows != b.len())
        throw std::invalid_argument("BilinearLS: inconsistent dimensions");
    if (lambda < 0.0) throw std::invalid_argument("BilinearLS: lambda must be >= 0");
}

DenseVector residual_ghat(const BilinearLS& p) {
    p.check_dims();
    DenseVector r = matvec(p.a, p.x);
    for (std::size_t i = 0; i < r.len(); ++i) r[i] -= p.b[i];
    return r;
}

DenseMatrix grad_A(const BilinearLS& p) {
    DenseVector r = residual_ghat(p);
    DenseMatrix g(p.a.rows, p.a.cols);
    for (std::size_t i = 0; i < g.rows; ++i)
        for (std::size_t j = 0; j < g.cols; ++j) g(i, j) = r[i] * p.x[j];
    if (p.reg_a == RegAKind::L2)
        for (std::size_t k = 0; k < g.data.size(); ++k) g.data[k] += p.reg_a_weight * p.a.data[k];
    return g;
}

static double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

DenseVector grad_x(const BilinearLS& p) {
    DenseVector r = residual_ghat(p);
    DenseVector g(p.x.len());
    for (std::size_t j = 0; j < g.len(); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.a.rows; ++i) acc += p.a(i, j) * r[i];
        g[j] = acc + p.lambda * sign0(p.x[j]);
    }
    return g;
}

double objective(const BilinearLS& p) {
    DenseVector r = residual_ghat(p);
    double val = 0.0;
    for (std::size_t i = 0; i < r.len(); ++i) val += r[i] * r[i];
    val *= 0.5;
    val += p.lambda * norm(p.x, NormKind::L1);
    if (p.reg_a == RegAKind::L2) {
        double n2 = norm(p.a, NormKind::L2);
        val += 0.5 * p.reg_a_weight * n2 * n2;
    }
    return val;
}

double beale_value(const BealeProblem& p) {
    const double t1 = p.c1 - p.x1 + p.x1 * p.x2;
    const double t2 = p.c2 - p.x1 + p.x1 * p.x2 * p.x2;
    const double t3 = p.c3 - p.x1 + p.x1 * p.x2 * p.x2 * p.x2;
    return t1 * t1 + t2 * t2 + t3 * t3;
}

double beale_constrained_value(const BealeProblem& p) {
    return beale_value(p) + std::abs(p.x1) + p.x2 * p.x2;
}

Grad2 beale_constrained_grad(const BealeProblem& p) {
    const double x1 = p.x1, x2 = p.x2;
    const double t1 = p.c1 - x1 + x1 * x2;
    const double t2 = p.c2 - x1 + x1 * x2 * x2;
    const double t3 = p.c3 - x1 + x1 * x2 * x2 * x2;
    Grad2 g;
    g.dx1 = 2.0 * t1 * (x2 - 1.0) + 2.0 * t2 * (x2 * x2 - 1.0) + 2.0 * t3 * (x2 * x2 * x2 - 1.0) +
            sign0(x1);
    g.dx2 = 2.0 * t1 * x1 + 2.0 * t2 * (2.0 * x1 * x2) + 2.0 * t3 * (3.0 * x1 * x2 * x2) +
            2.0 * x2;
    return g;
}

OptTrace run_toy(const OptimizerConfig& opt, const std::optional<CoGDConfig>& cogd,
                 const ToyRunOptions& run) {
    OptTrace trace;
    Optimizer optimizer(opt);
    BealeProblem p;
    p.c3 = run.c3;
    p.x1 = run.start_x1;
    p.x2 = run.start_x2;

    auto record = [&](std::int64_t it, double step_norm, bool fired) {
        Grad2 g = beale_constrained_grad(p);
        TraceRecord r;
        r.iter = it;
        r.objective = beale_constrained_value(p);
        r.grad_norm = std::sqrt(g.dx1 * g.dx1 + g.dx2 * g.dx2);
        r.step_norm = step_norm;
        r.detector_fired = fired;
        r.iterate = {p.x1, p.x2};
        trace.records.push_back(std::move(r));
    };
    record(0, 0.0, false);

    double prev_x1 = p.x1, prev_x2 = p.x2;
    for (std::int64_t it = 1; it <= run.iters; ++it) {
        const double x1_t = p.x1, x2_t = p.x2;
        Grad2 g = beale_constrained_grad(p);
        DenseVector v{p.x1, p.x2};
        optimizer.step(v, DenseVector{g.dx1, g.dx2});
        double x1_next = v[0];
        const double x2_next = v[1];

        bool fired = false;
        if (cogd) {
            // x1 plays the sparse role, x2 the coupled one; ghat is the
            // coupled variable's gradient, the ratio is the per-iteration
            // difference quotient dx2/dx1.
            DenseMatrix delta_a(1, 1);
            delta_a(0, 0) = x2_t - prev_x2;
            DenseVector delta_x{x1_t - prev_x1};
            auto res = cogd_update(DenseVector{x1_next}, DenseVector{x1_t}, {x2_t},
                                   DenseVector{g.dx2}, delta_a, delta_x, *cogd,
                                   opt.learning_rate, it - 1);
            x1_next = res.x[0];
            fired = res.fired;
        }

        prev_x1 = x1_t;
        prev_x2 = x2_t;
        const double d1 = x1_next - x1_t, d2 = x2_next - x2_t;
        const double step = std::sqrt(d1 * d1 + d2 * d2);
        p.x1 = x1_next;
        p.x2 = x2_next;
        trace.path_length += step;
        record(it, step, fired);
    }
    return trace;
}

OptTrace run_bilinear_ls(BilinearLS p, const OptimizerConfig& opt,
                         const std::optional<CoGDConfig>& cogd, const BilinearRunOptions& run) {
    p.check_dims();
    OptTrace trace;
    Optimizer opt_x(opt);
    const double eta_a = run.eta_a > 0.0 ? run.eta_a : opt.learning_rate;

    auto record = [&](std::int64_t it, double step_norm, bool fired) {
        TraceRecord r;
        r.iter = it;
        r.objective = objective(p);
        r.grad_norm = norm(grad_x(p), NormKind::L2);
        r.step_norm = step_norm;
        r.detector_fired = fired;
        trace.records.push_back(std::move(r));
    };
    record(0, 0.0, false);

    DenseMatrix a_prev = p.a;
    DenseVector x_prev = p.x;
    for (std::int64_t it = 1; it <= run.iters; ++it) {
        const DenseMatrix a_t = p.a;
        const DenseVector x_t = p.x;
        const DenseVector ghat = residual_ghat(p);

        if (run.update_a) {
            DenseMatrix ga = grad_A(p);
            for (std::size_t k = 0; k < p.a.data.size(); ++k) p.a.data[k] -= eta_a * ga.data[k];
        }

        DenseVector gx = grad_x(p);
        DenseVector x_next = p.x;
        opt_x.step(x_next, gx);

        bool fired = false;
        if (cogd) {
            DenseMatrix delta_a(a_t.rows, a_t.cols);
            for (std::size_t k = 0; k < delta_a.data.size(); ++k)
                delta_a.data[k] = a_t.data[k] - a_prev.data[k];
            DenseVector delta_x(x_t.len());
            for (std::size_t j = 0; j < x_t.len(); ++j) delta_x[j] = x_t[j] - x_prev[j];
            auto res = cogd_update(x_next, x_t, a_t.data, ghat, delta_a, delta_x, *cogd,
                                   opt.learning_rate, it - 1);
            x_next = res.x;
            fired = res.fired;
        }

        double step2 = 0.0;
        for (std::size_t k = 0; k < p.a.data.size(); ++k) {
            const double d = p.a.data[k] - a_t.data[k];
            step2 += d * d;
        }
        for (std::size_t j = 0; j < x_next.len(); ++j) {
            const double d = x_next[j] - x_t[j];
            step2 += d * d;
        }
        a_prev = a_t;
        x_prev = x_t;
        p.x = x_next;
        const double step = std::sqrt(step2);
        trace.path_length += step;
        record(it, step, fired);
    }
    return trace;
}

}  // namespace cogd
