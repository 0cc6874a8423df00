#include "cogd/optim.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cogd {

void Optimizer::reset() {
    velocity_ = DenseVector();
    m_ = DenseVector();
    v_ = DenseVector();
    t_ = 0;
}

void Optimizer::step(DenseVector& x, const DenseVector& grad) {
    if (x.len() != grad.len())
        throw std::invalid_argument("Optimizer::step: dimension mismatch");
    const std::size_t n = x.len();
    const double lr = cfg_.learning_rate;

    switch (cfg_.kind) {
        case OptimizerKind::Sgd:
            for (std::size_t i = 0; i < n; ++i) x[i] -= lr * grad[i];
            break;
        case OptimizerKind::Momentum: {
            if (velocity_.len() != n) velocity_ = DenseVector(n);
            for (std::size_t i = 0; i < n; ++i) {
                velocity_[i] = cfg_.momentum_coef * velocity_[i] + grad[i];
                x[i] -= lr * velocity_[i];
            }
            break;
        }
        case OptimizerKind::Adam: {
            if (m_.len() != n) {
                m_ = DenseVector(n);
                v_ = DenseVector(n);
                t_ = 0;
            }
            ++t_;
            const double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
            const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
            const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
            for (std::size_t i = 0; i < n; ++i) {
                m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
                v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
                const double mhat = m_[i] / bc1;
                const double vhat = v_[i] / bc2;
                x[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
            }
            break;
        }
    }
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string OptTrace::to_csv() const {
    std::string out = "iter,objective,grad_norm,step_norm,detector_fired\n";
    for (const auto& r : records) {
        out += std::to_string(r.iter);
        out += ',';
        out += format_double(r.objective);
        out += ',';
        out += format_double(r.grad_norm);
        out += ',';
        out += format_double(r.step_norm);
        out += ',';
        out += r.detector_fired ? '1' : '0';
        out += '\n';
    }
    return out;
}

bool detect_asynchrony(const std::vector<double>& x_val, const std::vector<double>& a_val,
                       const CoGDConfig& cfg) {
    const bool s_x = norm(x_val, cfg.norm_x) > cfg.alpha_x;
    const bool s_a = norm(a_val, cfg.norm_A) > cfg.alpha_A;
    return !s_x && s_a;
}

DenseVector coupling_vector(const DenseVector& ghat, const DenseMatrix& delta_a,
                            const DenseVector& delta_x, const CoGDConfig& cfg) {
    if (delta_a.rows != ghat.len() || delta_a.cols != delta_x.len())
        throw std::invalid_argument("coupling_vector: shape mismatch");
    const std::size_t m = delta_a.rows, n = delta_a.cols;
    DenseVector c(n);
    for (std::size_t j = 0; j < n; ++j) {
        const bool degenerate = std::abs(delta_x[j]) < cfg.fd_eps;
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double ratio = degenerate ? 1.0 : delta_a(i, j) / delta_x[j];
            acc += ghat[i] * ratio;
        }
        c[j] = acc;
    }
    return c;
}

DenseVector project_coupled(const DenseVector& x_next, const DenseVector& x_prev,
                            const DenseVector& beta) {
    if (x_next.len() != x_prev.len() || x_next.len() != beta.len())
        throw std::invalid_argument("project_coupled: length mismatch");
    DenseVector out = x_next;
    for (std::size_t i = 0; i < out.len(); ++i) out[i] += beta[i] * x_prev[i];
    return out;
}

CogdUpdateResult cogd_update(const DenseVector& x_next, const DenseVector& x_prev,
                             const std::vector<double>& a_val, const DenseVector& ghat,
                             const DenseMatrix& delta_a, const DenseVector& delta_x,
                             const CoGDConfig& cfg, double eta, std::int64_t iter) {
    if (cfg.coordination_period < 1)
        throw std::invalid_argument("cogd_update: coordination_period must be >= 1");
    if (iter % cfg.coordination_period != 0) return {x_next, false};
    if (cfg.beta_scale == 0.0) return {x_next, false};
    // Detector tests the time-t iterate, matching the threshold rule's
    // superscripts.
    if (!detect_asynchrony(x_prev.data, a_val, cfg)) return {x_next, false};

    DenseVector c = coupling_vector(ghat, delta_a, delta_x, cfg);
    DenseVector beta(c.len());
    for (std::size_t i = 0; i < c.len(); ++i) beta[i] = cfg.beta_scale * eta * c[i];
    return {project_coupled(x_next, x_prev, beta), true};
}

}  // namespace cogd
