#pragma once

#include <functional>
#include <vector>

#include "lvpp/linalg.hpp"

namespace lvpp::oracle {

// Proximal step for e(x) = x^2/2 + x with the Boltzmann entropy:
// root of alpha (x + 1) + ln x - ln x_k = 0.
double scalar_prox_step(double xk, double alpha);

// x_k exp(-alpha (x_k + 1))
double scalar_mirror_step(double xk, double alpha);

struct PsorResult {
    Vector x;     // nodal positions including the two boundary nodes
    Vector u;     // nodal values
    int sweeps = 0;
    double complementarity = 0.0;
};

// Projected SOR for -u'' = f on (0,1), u >= phi, u(0) = u(1) = g, with n nodes (P1, lumped load).
PsorResult psor_obstacle_1d(int n, const std::function<double(double)>& f, const std::function<double(double)>& phi,
                            double g, double tol = 1e-12, double omega = 1.5, int max_sweeps = 10000000);

} // namespace lvpp::oracle
