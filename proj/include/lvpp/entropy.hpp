#pragma once

#include <variant>

#include "lvpp/types.hpp"

namespace lvpp::entropy {

inline constexpr double kExpClamp = 700.0;

// exp with the argument clamped to [-700, 700].
double safe_exp(double y);

// x ln x - x, with 0 ln 0 = 0.
double neg_entropy_density(double x);

// u ln(u/w) - u + w.
double bregman_boltzmann(double u, double w);

double lnit(double x);
double sigmoid(double y);
// Derivative of sigmoid, computed without cancellation for large |y|.
double sigmoid_prime(double y);

double atanh_map(double x);
double tanh_map(double y);

// ln(u - phi), the gradient of the shifted entropy.
double shifted_gradient(double u, double phi);

// Generalized binary entropy on [lo, hi] and its Bregman divergence.
double binary_entropy_density(double u, double lo = 0.0, double hi = 1.0);
double bregman_fermi_dirac(double u, double w, double lo = 0.0, double hi = 1.0);

// Quadratic piece 0.5 x^2 and its divergence, used for the linearity property.
double bregman_quadratic(double u, double w);

struct Boltzmann {
    PointFn shift; // empty means zero
};

struct FermiDirac {
    PointFn lower; // empty means 0
    PointFn upper; // empty means 1
};

using EntropyKind = std::variant<Boltzmann, FermiDirac>;

// Pointwise gradient of the entropy, its inverse (the latent-to-primal map)
// and the derivative of that inverse, evaluated at (x, y).
double gradient(const EntropyKind& kind, double u, double x, double y);
double gradient_inverse(const EntropyKind& kind, double psi, double x, double y);
double gradient_inverse_prime(const EntropyKind& kind, double psi, double x, double y);
double bregman(const EntropyKind& kind, double u, double w, double x, double y);

} // namespace lvpp::entropy
