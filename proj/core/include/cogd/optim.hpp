#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cogd/dense.hpp"

namespace cogd {

enum class OptimizerKind { Sgd, Momentum, Adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::Sgd;
    double learning_rate = 0.001;
    double momentum_coef = 0.9;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

// Per-run first-order optimizer. Descent convention: steps subtract the
// gradient of the minimized objective.
class Optimizer {
  public:
    explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) {}

    // One update in place; allocates moment buffers lazily on first call.
    void step(DenseVector& x, const DenseVector& grad);

    const OptimizerConfig& config() const { return cfg_; }
    void reset();

  private:
    OptimizerConfig cfg_;
    DenseVector velocity_;   // momentum
    DenseVector m_, v_;      // adam moments
    std::int64_t t_ = 0;     // adam timestep
};

struct CoGDConfig {
    double beta_scale = 0.001;
    double alpha_x = 1.0;
    double alpha_A = 0.5;
    NormKind norm_x = NormKind::L1;
    NormKind norm_A = NormKind::L2;
    std::int64_t coordination_period = 1;
    double fd_eps = 1e-8;
};

// Previous iterates and the coupling vector, kept across coordination steps.
struct CoGDState {
    DenseVector x_prev;
    DenseVector a_prev;  // previous A flattened
    DenseVector c;
    std::vector<bool> detector_log;
};

struct TraceRecord {
    std::int64_t iter = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
    double step_norm = 0.0;
    bool detector_fired = false;
    std::vector<double> iterate;
};

struct OptTrace {
    std::vector<TraceRecord> records;
    double path_length = 0.0;

    // header: iter,objective,grad_norm,step_norm,detector_fired
    std::string to_csv() const;
};

// Locale-independent shortest round-trip formatting for CSV output.
std::string format_double(double v);

// (not s(x)) and s(A), with s(v) = 1 iff R(v) > alpha (strict).
bool detect_asynchrony(const std::vector<double>& x_val, const std::vector<double>& a_val,
                       const CoGDConfig& cfg);

// c_j = sum_i ghat_i * (delta_a(i,j) / delta_x_j); the ratio degenerates to 1
// where |delta_x_j| < fd_eps.
DenseVector coupling_vector(const DenseVector& ghat, const DenseMatrix& delta_a,
                            const DenseVector& delta_x, const CoGDConfig& cfg);

// x_next + beta (elementwise) x_prev.
DenseVector project_coupled(const DenseVector& x_next, const DenseVector& x_prev,
                            const DenseVector& beta);

struct CogdUpdateResult {
    DenseVector x;
    bool fired = false;
};

// Full coordination step: detector gated on the iteration period, coupling
// vector from epoch differences, projection with beta = beta_scale * eta * c.
CogdUpdateResult cogd_update(const DenseVector& x_next, const DenseVector& x_prev,
                             const std::vector<double>& a_val, const DenseVector& ghat,
                             const DenseMatrix& delta_a, const DenseVector& delta_x,
                             const CoGDConfig& cfg, double eta, std::int64_t iter);

}  // namespace cogd
