#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "lvpp/entropy.hpp"
#include "lvpp/error.hpp"
#include "lvpp/mesh.hpp"
#include "lvpp/oracle.hpp"
#include "lvpp/solver.hpp"
#include "lvpp/stability.hpp"

using namespace lvpp;

TEST(ScalarProx, Examples) {
    // (x + 1) + ln x = 0  =>  x = W(1/e)
    EXPECT_NEAR(oracle::scalar_prox_step(1.0, 1.0), 0.27846, 1e-5);
    const double x = oracle::scalar_prox_step(1.0, 1.0);
    EXPECT_NEAR(x + 1.0 + std::log(x), 0.0, 1e-13);
    EXPECT_NEAR(oracle::scalar_prox_step(0.7, 1e-12), 0.7, 1e-10);
    double xk = 2.0;
    for (int k = 0; k < 20; ++k) {
        const double next = oracle::scalar_prox_step(xk, 0.5);
        EXPECT_GT(next, 0.0);
        EXPECT_LT(next, xk);
        xk = next;
    }
}

TEST(ScalarMirror, Examples) {
    EXPECT_DOUBLE_EQ(oracle::scalar_mirror_step(0.4, 0.0), 0.4);
    EXPECT_NEAR(oracle::scalar_mirror_step(1.0, 1.0), std::exp(-2.0), 1e-16);
    double xk = 1.0;
    for (int k = 0; k < 50; ++k) xk = oracle::scalar_mirror_step(xk, 0.5);
    EXPECT_LT(xk, 1e-6);
    EXPECT_GT(xk, 0.0);
}

TEST(MirrorDescent, ScalarBoltzmann) {
    const GradientOracle grad = [](const Vector& x, double* obj) {
        if (obj) *obj = 0.5 * x[0] * x[0] + x[0];
        return Vector{x[0] + 1.0};
    };
    StepSchedule sch = StepSchedule::parse("fixed:1");
    MirrorDescentOptions o;
    o.max_iterations = 30;
    o.ntol = 0.0;
    const auto h = mirror_descent(grad, entropy::Boltzmann{}, {0.0}, {}, sch, o);
    ASSERT_EQ(h.psi.size(), 31u);
    EXPECT_NEAR(std::exp(h.psi[1][0]), std::exp(-2.0), 1e-15);
    // agrees with the closed-form step
    double x = 1.0;
    for (std::size_t k = 1; k < h.psi.size(); ++k) {
        x = oracle::scalar_mirror_step(x, 1.0);
        EXPECT_NEAR(std::exp(h.psi[k][0]), x, 1e-14 * std::max(1.0, x));
    }
    for (std::size_t k = 1; k < h.eta.size(); ++k) EXPECT_LT(h.eta[k], h.eta[k - 1]);
    for (std::size_t k = 1; k < h.objective.size(); ++k) EXPECT_LT(h.objective[k], h.objective[k - 1]);
    EXPECT_FALSE(h.converged);
}

TEST(MirrorDescent, VolumeConstraintHeld) {
    // minimize sum c_j rho_j over 0 < rho < 1 with fixed volume
    const Vector c = {0.3, -1.0, 2.0, 0.1, -0.4};
    const Vector m = {1.0, 2.0, 0.5, 1.0, 1.5};
    const GradientOracle grad = [&](const Vector& rho, double* obj) {
        double s = 0.0;
        for (std::size_t j = 0; j < rho.size(); ++j) s += c[j] * m[j] * rho[j];
        if (obj) *obj = s;
        return c;
    };
    StepSchedule sch = StepSchedule::parse("arith:1:0");
    MirrorDescentOptions o;
    o.volume_target = 2.5;
    o.max_iterations = 200;
    const auto h = mirror_descent(grad, entropy::FermiDirac{}, Vector(5, 0.0), m, sch, o);
    EXPECT_TRUE(h.converged);
    for (std::size_t k = 1; k < h.psi.size(); ++k) {
        double vol = 0.0;
        for (int j = 0; j < 5; ++j) vol += m[j] * entropy::sigmoid(h.psi[k][j]);
        EXPECT_NEAR(vol, 2.5, 1e-9);
    }
    // the cheapest cells fill first: index 1 (c = -1, m = 2) then index 4 (m = 1.5) takes the remaining 0.5
    const Vector& last = h.psi.back();
    EXPECT_GT(entropy::sigmoid(last[1]), 0.99);
    EXPECT_LT(entropy::sigmoid(last[2]), 0.01);
    EXPECT_NEAR(entropy::sigmoid(last[4]), 1.0 / 3.0, 1e-2);
}

TEST(Psor, ActiveSetSymmetric) {
    const int n = 401;
    const double omega = 2.0 / (1.0 + std::sin(3.141592653589793 / (n - 1)));
    const auto r = oracle::psor_obstacle_1d(n, [](double) { return -16.0; }, [](double) { return 0.0; }, 1.0, 1e-13,
                                            omega);
    int first = -1, last = -1;
    for (int i = 0; i < n; ++i) {
        EXPECT_GE(r.u[i], 0.0);
        if (r.u[i] == 0.0) {
            if (first < 0) first = i;
            last = i;
        }
    }
    ASSERT_GE(first, 0);
    EXPECT_EQ(first + last, n - 1);
    // exact contact set [x0, 1 - x0], x0 = 1/sqrt(8)
    const double h = 1.0 / (n - 1), x0 = 1.0 / std::sqrt(8.0);
    EXPECT_NEAR(first * h, x0, 2 * h);
    for (int i = 0; i < n; ++i) {
        const double x = i * h, d = std::max({x0 - x, x - (1 - x0), 0.0});
        EXPECT_NEAR(r.u[i], 8.0 * d * d, 10 * h * h);
    }
    EXPECT_LT(r.complementarity, 1e-10);
    EXPECT_THROW(oracle::psor_obstacle_1d(2, [](double) { return 0.0; }, {}, 0.0), ConfigError);
    EXPECT_THROW(oracle::psor_obstacle_1d(5, [](double) { return 0.0; }, {}, 0.0, 1e-12, 2.0), ConfigError);
}

TEST(Psor, UnconstrainedIsExactForQuadratics) {
    const int n = 21;
    const auto r = oracle::psor_obstacle_1d(n, [](double) { return 2.0; }, {}, 0.0, 1e-14, 1.7);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(r.u[i], r.x[i] * (1 - r.x[i]), 1e-11);
}

TEST(Stability, InfSupPositive) {
    double beta[3];
    int i = 0;
    for (int n : {2, 4, 8}) {
        beta[i] = discrete_inf_sup(unit_square_mesh(n));
        EXPECT_GT(beta[i], 0.2) << n;
        EXPECT_LE(beta[i], 1.0 + 1e-12) << n;
        ++i;
    }
    // bounded away from zero under refinement
    EXPECT_GT(beta[2], 0.8 * beta[0]);
}
