#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lvpp/entropy.hpp"
#include "lvpp/error.hpp"

using namespace lvpp;
using namespace lvpp::entropy;

namespace {

constexpr int kSamples = 10000;

// x ln x - x + lam x^2 / 2 and its derivative.
double combined(double x, double lam) { return neg_entropy_density(x) + 0.5 * lam * x * x; }
double combined_prime(double x, double lam) { return std::log(x) + lam * x; }

} // namespace

TEST(NegEntropy, Values) {
    EXPECT_DOUBLE_EQ(neg_entropy_density(1.0), -1.0);
    EXPECT_DOUBLE_EQ(neg_entropy_density(0.0), 0.0);
    EXPECT_NEAR(neg_entropy_density(std::exp(1.0)), 0.0, 1e-15);
    EXPECT_THROW(neg_entropy_density(-1e-3), DomainError);
}

TEST(BregmanBoltzmann, Values) {
    EXPECT_DOUBLE_EQ(bregman_boltzmann(1.0, 1.0), 0.0);
    EXPECT_NEAR(bregman_boltzmann(2.0, 1.0), 0.386294, 1e-6);
    EXPECT_NEAR(bregman_boltzmann(2.0, 1.0), 2.0 * std::log(2.0) - 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(bregman_boltzmann(0.0, 1.0), 1.0);
    EXPECT_THROW(bregman_boltzmann(1.0, 0.0), DomainError);
    EXPECT_THROW(bregman_boltzmann(1.0, -2.0), DomainError);
}

TEST(Maps, SigmoidLnit) {
    EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
    EXPECT_DOUBLE_EQ(lnit(0.5), 0.0);
    EXPECT_NEAR(lnit(0.3), -0.847298, 1e-6);
    EXPECT_NEAR(lnit(0.3), std::log(3.0 / 7.0), 1e-15);
    EXPECT_THROW(lnit(0.0), DomainError);
    EXPECT_THROW(lnit(1.0), DomainError);
}

TEST(Maps, SigmoidSaturatesInsideOpenInterval) {
    for (double y : {-1e6, -800.0, -700.0, -50.0, 50.0, 700.0, 800.0, 1e6}) {
        const double s = sigmoid(y);
        EXPECT_GT(s, 0.0) << y;
        EXPECT_LT(s, 1.0) << y;
        EXPECT_TRUE(std::isfinite(sigmoid_prime(y)));
    }
    EXPECT_GT(sigmoid(-1e300), 0.0);
    EXPECT_EQ(sigmoid(1e300), std::nextafter(1.0, 0.0));
    EXPECT_LT(sigmoid(-30.0), 1e-12);
}

TEST(Maps, TanhAtanh) {
    EXPECT_DOUBLE_EQ(tanh_map(0.0), 0.0);
    EXPECT_NEAR(atanh_map(tanh_map(2.0)), 2.0, 1e-12);
    EXPECT_NEAR(tanh_map(atanh_map(0.9)), 0.9, 1e-15);
    EXPECT_THROW(atanh_map(1.0), DomainError);
    EXPECT_THROW(atanh_map(-1.5), DomainError);
}

TEST(Maps, ShiftedGradient) {
    EXPECT_NEAR(shifted_gradient(1.0 + std::exp(1.0), 1.0), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(shifted_gradient(2.0, 1.0), 0.0);
    EXPECT_NEAR(shifted_gradient(1.5, 1.0), -0.693147, 1e-6);
    EXPECT_THROW(shifted_gradient(1.0, 1.0), DomainError);
    EXPECT_THROW(shifted_gradient(0.5, 1.0), DomainError);
}

TEST(Maps, SigmoidPrimeMatchesFiniteDifference) {
    for (double y : {-5.0, -0.3, 0.0, 1.7, 9.0}) {
        const double h = 1e-6;
        EXPECT_NEAR(sigmoid_prime(y), (sigmoid(y + h) - sigmoid(y - h)) / (2 * h), 1e-9);
    }
}

TEST(BregmanProperty, NonnegativityAndPositivity) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(1e-3, 5.0), F(1e-3, 1.0 - 1e-3);
    for (int i = 0; i < kSamples; ++i) {
        const double u = U(rng), w = U(rng);
        const double d = bregman_boltzmann(u, w);
        EXPECT_GE(d, -1e-12);
        EXPECT_NEAR(bregman_boltzmann(u, u), 0.0, 1e-12);
        if (std::abs(u - w) > 1e-3) EXPECT_GT(d, 0.0);

        const double a = F(rng), b = F(rng);
        const double dfd = bregman_fermi_dirac(a, b);
        EXPECT_GE(dfd, -1e-12);
        EXPECT_NEAR(bregman_fermi_dirac(a, a), 0.0, 1e-12);
        if (std::abs(a - b) > 1e-3) EXPECT_GT(dfd, 0.0);
    }
    // boundary values of u are allowed
    EXPECT_GT(bregman_fermi_dirac(0.0, 0.5), 0.0);
    EXPECT_GT(bregman_fermi_dirac(1.0, 0.5), 0.0);
}

TEST(BregmanProperty, ThreePointsIdentity) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(1e-2, 5.0);
    for (int i = 0; i < kSamples; ++i) {
        const double u = U(rng), v = U(rng), w = U(rng);
        const double lhs = bregman_boltzmann(u, v) - bregman_boltzmann(u, w) + bregman_boltzmann(v, w);
        const double rhs = (std::log(v) - std::log(w)) * (v - u);
        EXPECT_NEAR(lhs, rhs, 1e-12);
    }
}

TEST(BregmanProperty, Linearity) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> U(1e-2, 5.0), L(-2.0, 2.0);
    for (int i = 0; i < kSamples; ++i) {
        const double u = U(rng), w = U(rng), lam = L(rng);
        const double direct = combined(u, lam) - combined(w, lam) - combined_prime(w, lam) * (u - w);
        EXPECT_NEAR(direct, bregman_boltzmann(u, w) + lam * bregman_quadratic(u, w), 1e-12);
    }
}

TEST(BregmanProperty, GradientInverseConsistency) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> P(-3.0, 3.0), D(1e-6, 10.0), X(1e-9, 1.0 - 1e-9);
    for (int i = 0; i < kSamples; ++i) {
        const double phi = P(rng), u = phi + D(rng);
        EXPECT_NEAR(std::exp(shifted_gradient(u, phi)) + phi, u, 1e-12 * std::max(1.0, std::abs(u)));
        const double x = X(rng);
        EXPECT_NEAR(sigmoid(lnit(x)), x, 1e-12);
    }
}

TEST(EntropyKind, BoltzmannAndFermiDiracMaps) {
    const EntropyKind b = Boltzmann{[](double x, double) { return x; }};
    EXPECT_NEAR(gradient_inverse(b, gradient(b, 3.0, 1.0, 0.0), 1.0, 0.0), 3.0, 1e-14);
    EXPECT_NEAR(gradient_inverse_prime(b, 0.7, 0.0, 0.0), std::exp(0.7), 1e-14);
    EXPECT_NEAR(bregman(b, 3.0, 2.0, 1.0, 0.0), bregman_boltzmann(2.0, 1.0), 1e-14);

    const EntropyKind fd = FermiDirac{[](double, double) { return -1.0; }, [](double, double) { return 3.0; }};
    const double u = gradient_inverse(fd, 0.4, 0.0, 0.0);
    EXPECT_GT(u, -1.0);
    EXPECT_LT(u, 3.0);
    EXPECT_NEAR(gradient(fd, u, 0.0, 0.0), 0.4, 1e-13);
    EXPECT_NEAR(gradient_inverse_prime(fd, 0.4, 0.0, 0.0), 4.0 * sigmoid_prime(0.4), 1e-14);
    EXPECT_THROW(gradient(fd, 3.0, 0.0, 0.0), DomainError);
    EXPECT_GE(bregman(fd, 2.0, 1.0, 0.0, 0.0), 0.0);
}

TEST(Maps, SafeExpClamps) {
    EXPECT_TRUE(std::isfinite(safe_exp(1e4)));
    EXPECT_GT(safe_exp(-1e4), 0.0);
    EXPECT_DOUBLE_EQ(safe_exp(1.0), std::exp(1.0));
}
