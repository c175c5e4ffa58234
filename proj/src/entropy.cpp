#include "lvpp/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lvpp/error.hpp"

namespace lvpp::entropy {

namespace {

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

double eval_or(const PointFn& f, double fallback, double x, double y) {
    return f ? f(x, y) : fallback;
}

} // namespace

double safe_exp(double y) { return std::exp(std::clamp(y, -kExpClamp, kExpClamp)); }

double neg_entropy_density(double x) {
    if (!(x >= 0.0)) throw DomainError("neg_entropy_density: negative argument");
    if (x == 0.0) return 0.0;
    return x * std::log(x) - x;
}

double bregman_boltzmann(double u, double w) {
    if (!(w > 0.0)) throw DomainError("bregman_boltzmann: w must be positive");
    if (!(u >= 0.0)) throw DomainError("bregman_boltzmann: u must be nonnegative");
    if (u == 0.0) return w;
    return u * std::log(u / w) - u + w;
}

double lnit(double x) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("lnit: argument outside (0,1)");
    return std::log(x) - std::log1p(-x);
}

double sigmoid(double y) {
    y = std::clamp(y, -kExpClamp, kExpClamp);
    if (y >= 0.0) return std::min(1.0 / (1.0 + std::exp(-y)), std::nextafter(1.0, 0.0));
    const double e = std::exp(y);
    return std::max(e / (1.0 + e), std::numeric_limits<double>::denorm_min());
}

double sigmoid_prime(double y) {
    y = std::clamp(y, -kExpClamp, kExpClamp);
    const double e = std::exp(-std::abs(y));
    return e / ((1.0 + e) * (1.0 + e));
}

double atanh_map(double x) {
    if (!(std::abs(x) < 1.0)) throw DomainError("atanh_map: |x| must be < 1");
    return std::atanh(x);
}

double tanh_map(double y) { return std::tanh(y); }

double shifted_gradient(double u, double phi) {
    if (!(u > phi)) throw DomainError("shifted_gradient: u must exceed the shift");
    return std::log(u - phi);
}

double binary_entropy_density(double u, double lo, double hi) {
    if (!(lo < hi)) throw DomainError("binary entropy: lower bound must be below upper bound");
    if (!(u >= lo && u <= hi)) throw DomainError("binary entropy: u outside [lo, hi]");
    return xlogx(u - lo) + xlogx(hi - u);
}

double bregman_fermi_dirac(double u, double w, double lo, double hi) {
    if (!(w > lo && w < hi)) throw DomainError("bregman_fermi_dirac: w must be interior");
    const double grad = std::log(w - lo) - std::log(hi - w);
    return binary_entropy_density(u, lo, hi) - binary_entropy_density(w, lo, hi) - grad * (u - w);
}

double bregman_quadratic(double u, double w) { return 0.5 * (u - w) * (u - w); }

double gradient(const EntropyKind& kind, double u, double x, double y) {
    if (const auto* b = std::get_if<Boltzmann>(&kind)) {
        return shifted_gradient(u, eval_or(b->shift, 0.0, x, y));
    }
    const auto& fd = std::get<FermiDirac>(kind);
    const double lo = eval_or(fd.lower, 0.0, x, y);
    const double hi = eval_or(fd.upper, 1.0, x, y);
    if (!(lo < hi)) throw DomainError("FermiDirac: lower bound must be below upper bound");
    if (!(u > lo && u < hi)) throw DomainError("FermiDirac gradient: u must be interior");
    return std::log(u - lo) - std::log(hi - u);
}

double gradient_inverse(const EntropyKind& kind, double psi, double x, double y) {
    if (const auto* b = std::get_if<Boltzmann>(&kind)) {
        return eval_or(b->shift, 0.0, x, y) + safe_exp(psi);
    }
    const auto& fd = std::get<FermiDirac>(kind);
    const double lo = eval_or(fd.lower, 0.0, x, y);
    const double hi = eval_or(fd.upper, 1.0, x, y);
    return lo + (hi - lo) * sigmoid(psi);
}

double gradient_inverse_prime(const EntropyKind& kind, double psi, double x, double y) {
    if (std::holds_alternative<Boltzmann>(kind)) return safe_exp(psi);
    const auto& fd = std::get<FermiDirac>(kind);
    const double lo = eval_or(fd.lower, 0.0, x, y);
    const double hi = eval_or(fd.upper, 1.0, x, y);
    return (hi - lo) * sigmoid_prime(psi);
}

double bregman(const EntropyKind& kind, double u, double w, double x, double y) {
    if (const auto* b = std::get_if<Boltzmann>(&kind)) {
        const double s = eval_or(b->shift, 0.0, x, y);
        return bregman_boltzmann(u - s, w - s);
    }
    const auto& fd = std::get<FermiDirac>(kind);
    return bregman_fermi_dirac(u, w, eval_or(fd.lower, 0.0, x, y), eval_or(fd.upper, 1.0, x, y));
}

} // namespace lvpp::entropy
