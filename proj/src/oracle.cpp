#include "lvpp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lvpp/error.hpp"

namespace lvpp::oracle {

double scalar_prox_step(double xk, double alpha) {
    if (!(xk > 0.0)) throw DomainError("scalar_prox_step: x_k must be positive");
    if (!(alpha >= 0.0)) throw DomainError("scalar_prox_step: alpha must be nonnegative");
    if (alpha == 0.0) return xk;
    const double lk = std::log(xk);
    // F(t) = alpha (e^t + 1) + t - lk in t = ln x, increasing and convex
    auto F = [&](double t) { return alpha * (std::exp(t) + 1.0) + t - lk; };
    double hi = lk; // F(lk) > 0
    double lo = lk - alpha * (xk + 1.0) - 1.0;
    while (F(lo) > 0.0) lo -= 2.0 * (hi - lo);
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double v = F(t);
        if (v > 0.0) hi = t; else lo = t;
        const double d = alpha * std::exp(t) + 1.0;
        double tn = t - v / d;
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) <= 1e-16 * std::max(1.0, std::abs(t))) {
            t = tn;
            break;
        }
        t = tn;
    }
    return std::exp(t);
}

double scalar_mirror_step(double xk, double alpha) {
    if (!(xk > 0.0)) throw DomainError("scalar_mirror_step: x_k must be positive");
    return xk * std::exp(-alpha * (xk + 1.0));
}

PsorResult psor_obstacle_1d(int n, const std::function<double(double)>& f, const std::function<double(double)>& phi,
                            double g, double tol, double omega, int max_sweeps) {
    if (n < 3) throw ConfigError("psor_obstacle_1d: need at least 3 nodes");
    if (!(omega > 0.0 && omega < 2.0)) throw ConfigError("psor_obstacle_1d: omega must lie in (0, 2)");
    PsorResult r;
    const double h = 1.0 / (n - 1);
    r.x.resize(n);
    r.u.assign(n, 0.0);
    Vector b(n, 0.0), lo(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = i * h;
        b[i] = h * f(r.x[i]);
        lo[i] = phi ? phi(r.x[i]) : -std::numeric_limits<double>::infinity();
    }
    r.u[0] = r.u[n - 1] = g;
    for (int i = 1; i < n - 1; ++i) r.u[i] = std::max(lo[i], g);
    // stiffness (1/h) tridiag(-1, 2, -1)
    auto residual = [&](int i) { return b[i] - (2.0 * r.u[i] - r.u[i - 1] - r.u[i + 1]) / h; };
    for (int s = 1; s <= max_sweeps; ++s) {
        double change = 0.0;
        for (int i = 1; i < n - 1; ++i) {
            const double gs = 0.5 * (r.u[i - 1] + r.u[i + 1] + h * b[i]);
            const double v = std::max(lo[i], r.u[i] + omega * (gs - r.u[i]));
            change = std::max(change, std::abs(v - r.u[i]));
            r.u[i] = v;
        }
        r.sweeps = s;
        if (change < tol) {
            double comp = 0.0;
            for (int i = 1; i < n - 1; ++i) {
                const double res = residual(i);
                const double gap = r.u[i] - lo[i];
                if (std::isfinite(gap)) comp = std::max(comp, std::abs(res * gap));
                else comp = std::max(comp, std::abs(res) * h);
            }
            r.complementarity = comp;
            return r;
        }
    }
    throw NonConvergence("psor_obstacle_1d: no convergence");
}

} // namespace lvpp::oracle
