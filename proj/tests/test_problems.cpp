#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lvpp/error.hpp"
#include "lvpp/problems.hpp"

using namespace lvpp;

TEST(Problems, Biactive) {
    const auto p = biactive_problem();
    EXPECT_DOUBLE_EQ(p.f(-0.3, 0.7), 0.0);
    EXPECT_DOUBLE_EQ(p.f(0.5, 0.0), -3.0);
    EXPECT_DOUBLE_EQ(p.exact_u(0.5, -1.0), 0.0625);
    EXPECT_DOUBLE_EQ(p.exact_u(-0.5, 0.2), 0.0);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) EXPECT_DOUBLE_EQ(p.exact_lambda(U(rng), U(rng)), 0.0);
}

TEST(Problems, StrictComplementarityHasNoExactSolution) {
    const auto p = strict_complementarity_problem();
    EXPECT_FALSE(p.has_exact());
    EXPECT_NEAR(p.f(0.5, 0.5), 2 * std::numbers::pi * std::numbers::pi, 1e-12);
    EXPECT_NEAR(p.f(0.5, -0.5), -2 * std::numbers::pi * std::numbers::pi, 1e-12);
}

TEST(Problems, NonsmoothMultiplier) {
    const auto p = nonsmooth_multiplier_problem();
    EXPECT_DOUBLE_EQ(p.exact_lambda(0.9, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(p.exact_lambda(0.5, 0.5), 0.0);
    EXPECT_DOUBLE_EQ(p.exact_u(0.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(p.exact_u(0.6, 0.0), 0.0);
    // -lap u - f = lambda at a point of the inactive disk: check with finite differences
    const double x = 0.2, y = 0.1, h = 1e-4;
    const double lap = (p.exact_u(x + h, y) + p.exact_u(x - h, y) + p.exact_u(x, y + h) + p.exact_u(x, y - h) -
                        4 * p.exact_u(x, y)) / (h * h);
    EXPECT_NEAR(-lap, p.f(x, y), 1e-5);
    EXPECT_DOUBLE_EQ(p.f(0.95, 0.0), -1.0);
}

TEST(Problems, SphericalConstants) {
    const auto c = spherical_constants();
    EXPECT_NEAR(c.a, 0.34898, 1e-5);
    EXPECT_NEAR(c.A, -0.34012, 1e-4);
    const auto p = spherical_obstacle_problem();
    EXPECT_NEAR(p.exact_u(0.5, 0.0), c.A * std::log(0.5), 1e-15);
    EXPECT_NEAR(p.exact_u(0.5, 0.0), 0.23576, 1e-5);
    EXPECT_NEAR(p.exact_u(std::cos(0.3), std::sin(0.3)), 0.0, 1e-15);
}

TEST(Problems, SphericalSolutionIsC1) {
    const auto c = spherical_constants();
    const double a = c.a;
    const double cap = std::sqrt(0.25 - a * a), cap_d = -a / std::sqrt(0.25 - a * a);
    EXPECT_NEAR(c.A * std::log(a), cap, 1e-10);
    EXPECT_NEAR(c.A / a, cap_d, 1e-10);
    // obstacle sits below the solution outside the contact disk
    const auto p = spherical_obstacle_problem();
    for (double r = a + 1e-3; r < 1.0; r += 0.01) EXPECT_LT(p.phi(r, 0.0), p.exact_u(r, 0.0));
    for (double r = 0.0; r < a; r += 0.01) EXPECT_NEAR(p.phi(0.0, r), p.exact_u(0.0, r), 1e-15);
}

TEST(LambertW, Branches) {
    const double z = -1.0 / (2.0 * std::exp(2.0));
    const double w = lambert_w_branch(z, -1);
    EXPECT_NEAR(w, -4.1054, 1e-4);
    EXPECT_NEAR(w * std::exp(w), z, 1e-16);
    EXPECT_NEAR(std::exp(w / 2 + 1), 0.34898, 1e-5);
    for (double x : {-0.3, -0.1, 0.5, 1.0, 10.0, 1e6}) {
        const double w0 = lambert_w_branch(x, 0);
        EXPECT_NEAR(w0 * std::exp(w0), x, 1e-13 * std::max(1.0, std::abs(x)));
        EXPECT_GE(w0, -1.0);
    }
    for (double x : {-0.36, -0.1, -1e-5}) {
        const double wm = lambert_w_branch(x, -1);
        EXPECT_NEAR(wm * std::exp(wm), x, 1e-14);
        EXPECT_LE(wm, -1.0);
    }
    EXPECT_NEAR(lambert_w_branch(std::exp(1.0), 0), 1.0, 1e-15);
    EXPECT_THROW(lambert_w_branch(-0.5, 0), DomainError);
    EXPECT_THROW(lambert_w_branch(0.5, -1), DomainError);
    EXPECT_THROW(lambert_w_branch(0.5, 1), DomainError);
}

TEST(ErikssonJohnson, Roots) {
    const auto r = eriksson_johnson_roots(0.01, 1);
    EXPECT_NEAR(r.r1, 100.0986, 1e-4);
    EXPECT_NEAR(r.r2, -0.098598, 1e-6);
    EXPECT_THROW(eriksson_johnson_roots(0.0, 1), DomainError);
}

TEST(ErikssonJohnson, SolvesThePde) {
    const double eps = 0.01;
    const double C[3] = {1.0, 0.3, -0.2};
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0.01, 0.99);
    for (int i = 0; i < 200; ++i) {
        const double x = U(rng), y = U(rng);
        const double res = -eps * eriksson_johnson_laplacian(x, y, eps, C) + eriksson_johnson_gradient(x, y, eps, C).x;
        EXPECT_LT(std::abs(res), 1e-8);
    }
    for (double x : {0.0, 0.3, 0.9, 1.0}) {
        EXPECT_LT(std::abs(eriksson_johnson_gradient(x, 0.0, eps, C).y), 1e-10);
        EXPECT_LT(std::abs(eriksson_johnson_gradient(x, 1.0, eps, C).y), 1e-10);
    }
    // boundary layer at x = 1
    for (double y : {0.0, 0.4, 1.0}) EXPECT_NEAR(eriksson_johnson_exact(1.0, y, eps, C), 0.0, 1e-14);
}

TEST(ErikssonJohnson, BenchmarkRange) {
    const auto b = eriksson_johnson_benchmark(0.01);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; j <= 100; ++j) {
            const double v = b.value(i / 100.0, j / 100.0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    EXPECT_NEAR(lo, 0.0, 1e-12);
    EXPECT_NEAR(hi, 1.0, 1e-12);
    const double h = 1e-6;
    const Vec2 g = b.gradient(0.4, 0.3);
    EXPECT_NEAR(g.x, (b.value(0.4 + h, 0.3) - b.value(0.4 - h, 0.3)) / (2 * h), 1e-6);
    EXPECT_NEAR(g.y, (b.value(0.4, 0.3 + h) - b.value(0.4, 0.3 - h)) / (2 * h), 1e-6);
}

TEST(Problems, ByName) {
    for (const auto& n : obstacle_problem_names()) EXPECT_NO_THROW(obstacle_problem_by_name(n)) << n;
    EXPECT_EQ(obstacle_problem_by_name("strict").name, "kkt");
    EXPECT_THROW(obstacle_problem_by_name("unknown"), ConfigError);
    const auto s = strip_parabola_problem(-16.0);
    EXPECT_NEAR(s.exact_u(0.0, 0.0), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(s.exact_u(0.5, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(s.exact_lambda(0.5, 0.0), 16.0);
}
