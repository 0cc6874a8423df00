#include <doctest.h>

#include <stdexcept>

#include <cstring>

#include "cogd/optim.hpp"

using namespace cogd;

TEST_CASE("sgd step is x - lr * g exactly") {
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::Sgd;
    cfg.learning_rate = 0.25;
    Optimizer opt(cfg);
    DenseVector x{1.0, -2.0};
    opt.step(x, DenseVector{4.0, -8.0});
    CHECK(x[0] == 0.0);
    CHECK(x[1] == 0.0);
}

TEST_CASE("momentum accumulates velocity over two steps") {
    // v <- mu v + g, x <- x - lr v; with mu=0.9, lr=0.1, g = 2 then -1:
    // v1 = 2, x1 = -0.2; v2 = 0.8, x2 = -0.28.
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::Momentum;
    cfg.learning_rate = 0.1;
    cfg.momentum_coef = 0.9;
    Optimizer opt(cfg);
    DenseVector x{0.0};
    opt.step(x, DenseVector{2.0});
    CHECK(x[0] == doctest::Approx(-0.2).epsilon(1e-15));
    opt.step(x, DenseVector{-1.0});
    CHECK(x[0] == doctest::Approx(-0.28).epsilon(1e-15));
}

TEST_CASE("adam first step matches the bias-corrected closed form") {
    // t=1: mhat = g, vhat = g^2, step = lr * g / (|g| + eps).
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::Adam;
    cfg.learning_rate = 0.1;
    Optimizer opt(cfg);
    DenseVector x{1.0};
    opt.step(x, DenseVector{3.0});
    CHECK(x[0] == doctest::Approx(0.9000000003333333).epsilon(1e-15));
}

TEST_CASE("step rejects dimension mismatch") {
    Optimizer opt(OptimizerConfig{});
    DenseVector x{1.0, 2.0};
    CHECK_THROWS_AS(opt.step(x, DenseVector{1.0}), std::invalid_argument);
}

TEST_CASE("detector truth table with strict thresholds") {
    CoGDConfig cfg;  // alpha_x = 1 (l1), alpha_A = 0.5 (l2)
    // fires only when x is at-or-below its threshold AND A is above its own
    CHECK(detect_asynchrony({0.5}, {2.0}, cfg));
    CHECK_FALSE(detect_asynchrony({2.0}, {2.0}, cfg));   // x active too
    CHECK_FALSE(detect_asynchrony({0.5}, {0.1}, cfg));   // A inactive too
    CHECK_FALSE(detect_asynchrony({2.0}, {0.1}, cfg));
    // ties are not "above": R(v) == alpha counts as inactive
    CHECK_FALSE(detect_asynchrony({0.0}, {0.5}, cfg));
    CHECK(detect_asynchrony({1.0}, {0.5000001}, cfg));
}

TEST_CASE("coupling vector against hand arithmetic") {
    CoGDConfig cfg;
    DenseVector ghat{1.0, 2.0};
    DenseMatrix da(2, 2);
    da(0, 0) = 2; da(0, 1) = 4;
    da(1, 0) = 6; da(1, 1) = 8;
    DenseVector dx{2.0, 4.0};
    DenseVector c = coupling_vector(ghat, da, dx, cfg);
    REQUIRE(c.len() == 2);
    CHECK(c[0] == doctest::Approx(7.0).epsilon(1e-15));  // (1*2 + 2*6) / 2
    CHECK(c[1] == doctest::Approx(5.0).epsilon(1e-15));  // (1*4 + 2*8) / 4
}

TEST_CASE("degenerate coordinate falls back to the gradient sum") {
    CoGDConfig cfg;  // fd_eps = 1e-8
    DenseVector ghat{1.0, 2.0};
    DenseMatrix da(2, 1);
    da(0, 0) = 5.0;
    da(1, 0) = -3.0;
    DenseVector dx{0.0};
    DenseVector c = coupling_vector(ghat, da, dx, cfg);
    // ratio := 1 for the stalled coordinate, so c = sum_i ghat_i = 3
    CHECK(c[0] == 3.0);
    dx[0] = 5e-9;  // still under fd_eps
    CHECK(coupling_vector(ghat, da, dx, cfg)[0] == 3.0);
}

TEST_CASE("projection adds beta elementwise times the previous iterate") {
    DenseVector out = project_coupled(DenseVector{1.0, 2.0}, DenseVector{10.0, -10.0},
                                      DenseVector{0.1, 0.2});
    CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("beta_scale zero is a bitwise pass-through") {
    CoGDConfig cfg;
    cfg.beta_scale = 0.0;
    DenseVector x_next{-0.0, 1.5, 3.0};
    DenseVector x_prev{1.0, 1.0, 1.0};
    DenseMatrix da(1, 3, 1.0);
    auto res = cogd_update(x_next, x_prev, {9.0}, DenseVector{1.0}, da,
                           DenseVector{1.0, 1.0, 1.0}, cfg, 1.0, 0);
    CHECK_FALSE(res.fired);
    REQUIRE(res.x.len() == 3);
    CHECK(std::memcmp(res.x.data.data(), x_next.data.data(), 3 * sizeof(double)) == 0);
}

TEST_CASE("update fires only when the previous iterate is asynchronous") {
    CoGDConfig cfg;  // beta_scale 0.001
    DenseVector x_next{0.2};
    DenseVector ghat{1.0};
    DenseMatrix da(1, 1);
    da(0, 0) = 2.0;
    DenseVector dx{1.0};

    // x_prev quiet (|x| <= 1), A loud: fires
    auto fired = cogd_update(x_next, DenseVector{0.5}, {3.0}, ghat, da, dx, cfg, 2.0, 1);
    CHECK(fired.fired);
    // beta = 0.001 * 2.0 * (1*2/1) = 0.004; x = 0.2 + 0.004 * 0.5
    CHECK(fired.x[0] == doctest::Approx(0.202).epsilon(1e-12));

    // x_prev loud: no projection
    auto quiet = cogd_update(x_next, DenseVector{5.0}, {3.0}, ghat, da, dx, cfg, 2.0, 1);
    CHECK_FALSE(quiet.fired);
    CHECK(quiet.x[0] == 0.2);
}

TEST_CASE("coordination period gates the detector") {
    CoGDConfig cfg;
    cfg.coordination_period = 3;
    DenseVector x_next{0.2}, x_prev{0.5}, ghat{1.0}, dx{1.0};
    DenseMatrix da(1, 1);
    da(0, 0) = 2.0;
    CHECK(cogd_update(x_next, x_prev, {3.0}, ghat, da, dx, cfg, 1.0, 0).fired);
    CHECK_FALSE(cogd_update(x_next, x_prev, {3.0}, ghat, da, dx, cfg, 1.0, 1).fired);
    CHECK_FALSE(cogd_update(x_next, x_prev, {3.0}, ghat, da, dx, cfg, 1.0, 2).fired);
    CHECK(cogd_update(x_next, x_prev, {3.0}, ghat, da, dx, cfg, 1.0, 3).fired);
}

TEST_CASE("format_double round-trips and spells infinity as inf") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(1.0 / 0.0) == "inf");
    CHECK(format_double(-1.0 / 0.0) == "-inf");
}

TEST_CASE("trace csv header and row shape") {
    OptTrace t;
    TraceRecord r;
    r.iter = 3;
    r.objective = 1.5;
    r.grad_norm = 2.0;
    r.step_norm = 0.5;
    r.detector_fired = true;
    t.records.push_back(r);
    CHECK(t.to_csv() == "iter,objective,grad_norm,step_norm,detector_fired\n3,1.5,2,0.5,1\n");
}
