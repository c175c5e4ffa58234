#include "lvpp/problems.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "lvpp/error.hpp"

namespace lvpp {

namespace {

constexpr double kPi = std::numbers::pi;

PointFn zero() {
    return [](double, double) { return 0.0; };
}

} // namespace

ObstacleProblem biactive_problem() {
    ObstacleProblem p;
    p.name = "biactive";
    p.exact_u = [](double x, double) { return x >= 0.0 ? x * x * x * x : 0.0; };
    p.exact_grad = [](double x, double) { return Vec2{x >= 0.0 ? 4.0 * x * x * x : 0.0, 0.0}; };
    p.f = [](double x, double) { return x >= 0.0 ? -12.0 * x * x : 0.0; };
    p.phi = zero();
    p.g = p.exact_u;
    p.exact_lambda = zero();
    return p;
}

ObstacleProblem strict_complementarity_problem() {
    ObstacleProblem p;
    p.name = "kkt";
    p.f = [](double x, double y) { return 2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y); };
    p.phi = zero();
    p.g = zero();
    return p;
}

ObstacleProblem nonsmooth_multiplier_problem() {
    ObstacleProblem p;
    p.name = "nonsmooth";
    p.exact_u = [](double x, double y) {
        const double r2 = x * x + y * y;
        if (r2 >= 0.25) return 0.0;
        const double s = 1.0 - 4.0 * r2;
        return s * s * s * s;
    };
    p.exact_grad = [](double x, double y) {
        const double r2 = x * x + y * y;
        if (r2 >= 0.25) return Vec2{0.0, 0.0};
        const double s = 1.0 - 4.0 * r2;
        const double c = -32.0 * s * s * s;
        return Vec2{c * x, c * y};
    };
    p.exact_lambda = [](double x, double y) { return x * x + y * y > 0.75 ? 1.0 : 0.0; };
    p.f = [](double x, double y) {
        const double r2 = x * x + y * y;
        double f = 0.0;
        if (r2 < 0.25) {
            const double s = 1.0 - 4.0 * r2;
            f = 64.0 * s * s * s - 768.0 * r2 * s * s;
        }
        if (r2 > 0.75) f -= 1.0;
        return f;
    };
    p.phi = zero();
    p.g = p.exact_u;
    return p;
}

double lambert_w_branch(double z, int branch) {
    constexpr double kInvE = 0.36787944117144233;
    if (branch != 0 && branch != -1) throw DomainError("lambert_w_branch: branch must be 0 or -1");
    if (z < -kInvE - 1e-15) throw DomainError("lambert_w_branch: z below -1/e");
    if (branch == -1 && !(z < 0.0)) throw DomainError("lambert_w_branch: branch -1 needs z < 0");
    if (z <= -kInvE) return -1.0;
    if (branch == 0 && z == 0.0) return 0.0;

    double w;
    const double p = std::sqrt(2.0 * (std::numbers::e * z + 1.0));
    if (branch == 0) {
        if (z < -0.25) {
            w = -1.0 + p - p * p / 3.0;
        } else if (z < 3.0) {
            w = std::log1p(z) * (1.0 - std::log1p(std::log1p(z)) / (2.0 + std::log1p(z)));
        } else {
            const double l = std::log(z);
            w = l - std::log(l);
        }
    } else {
        if (z < -0.25) {
            w = -1.0 - p - p * p / 3.0;
        } else {
            const double l = std::log(-z);
            w = l - std::log(-l);
        }
    }
    // Halley iterations
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - z;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= dw;
        if (std::abs(dw) <= 1e-15 * (1.0 + std::abs(w))) break;
    }
    return w;
}

SphericalConstants spherical_constants() {
    SphericalConstants c;
    const double w = lambert_w_branch(-1.0 / (2.0 * std::exp(2.0)), -1);
    c.a = std::exp(w / 2.0 + 1.0);
    c.A = std::sqrt(0.25 - c.a * c.a) / std::log(c.a);
    return c;
}

double spherical_obstacle(double x, double y) {
    constexpr double r0 = 0.5;
    constexpr double b = 0.9 * r0;
    const double r = std::hypot(x, y);
    if (r <= b) return std::sqrt(r0 * r0 - r * r);
    const double tmp = std::sqrt(r0 * r0 - b * b);
    return tmp + b * b / tmp - (b / tmp) * r;
}

ObstacleProblem spherical_obstacle_problem() {
    ObstacleProblem p;
    p.name = "spherical";
    p.domain = DomainKind::Disk;
    const auto c = spherical_constants();
    p.f = zero();
    p.g = zero();
    p.phi = spherical_obstacle;
    p.exact_u = [c](double x, double y) {
        const double r = std::hypot(x, y);
        return r > c.a ? c.A * std::log(r) : std::sqrt(0.25 - r * r);
    };
    p.exact_grad = [c](double x, double y) {
        const double r2 = x * x + y * y;
        const double r = std::sqrt(r2);
        if (r > c.a) return Vec2{c.A * x / r2, c.A * y / r2};
        const double s = std::sqrt(0.25 - r2);
        return Vec2{-x / s, -y / s};
    };
    return p;
}

ObstacleProblem constant_problem() {
    ObstacleProblem p;
    p.name = "constant";
    p.f = zero();
    p.phi = zero();
    p.g = [](double, double) { return 1.0; };
    p.exact_u = p.g;
    p.exact_grad = [](double, double) { return Vec2{0.0, 0.0}; };
    p.exact_lambda = zero();
    return p;
}

ObstacleProblem strip_parabola_problem(double c) {
    ObstacleProblem p;
    p.name = "strip";
    p.domain = DomainKind::Strip;
    p.f = [c](double, double) { return c; };
    p.phi = zero();
    p.g = [](double, double) { return 1.0; };
    const double x0 = c < 0.0 ? std::sqrt(2.0 / -c) : std::numeric_limits<double>::infinity();
    if (x0 < 0.5) {
        p.exact_u = [c, x0](double x, double) {
            const double d = std::max({x0 - x, x - (1.0 - x0), 0.0});
            return -0.5 * c * d * d;
        };
        p.exact_grad = [c, x0](double x, double) {
            if (x < x0) return Vec2{c * (x0 - x), 0.0};
            if (x > 1.0 - x0) return Vec2{-c * (x - (1.0 - x0)), 0.0};
            return Vec2{0.0, 0.0};
        };
        p.exact_lambda = [c, x0](double x, double) { return (x >= x0 && x <= 1.0 - x0) ? -c : 0.0; };
    } else {
        p.exact_u = [c](double x, double) { return 1.0 - 0.5 * c * (x * x - x); };
        p.exact_grad = [c](double x, double) { return Vec2{-0.5 * c * (2.0 * x - 1.0), 0.0}; };
        p.exact_lambda = zero();
    }
    return p;
}

std::vector<std::string> obstacle_problem_names() {
    return {"biactive", "kkt", "nonsmooth", "spherical", "constant", "strip"};
}

ObstacleProblem obstacle_problem_by_name(const std::string& name) {
    if (name == "biactive") return biactive_problem();
    if (name == "kkt" || name == "strict") return strict_complementarity_problem();
    if (name == "nonsmooth") return nonsmooth_multiplier_problem();
    if (name == "spherical") return spherical_obstacle_problem();
    if (name == "constant") return constant_problem();
    if (name == "strip") return strip_parabola_problem();
    throw ConfigError("unknown obstacle problem '" + name + "'");
}

EjRoots eriksson_johnson_roots(double eps, int n) {
    if (!(eps > 0.0)) throw DomainError("eriksson_johnson: eps must be positive");
    const double lam = n * n * kPi * kPi * eps;
    const double s = std::sqrt(1.0 + 4.0 * eps * lam);
    return {(1.0 + s) / (2.0 * eps), (1.0 - s) / (2.0 * eps)};
}

namespace {

// X_n(x), X_n'(x), X_n''(x) of the separated solution.
std::array<double, 3> ej_profile(double x, double eps, int n) {
    const auto [r1, r2] = eriksson_johnson_roots(eps, n);
    const double d = r1 * std::exp(-r2) - r2 * std::exp(-r1);
    const double e1 = std::exp(r1 * (x - 1.0)), e2 = std::exp(r2 * (x - 1.0));
    return {(e2 - e1) / d, (r2 * e2 - r1 * e1) / d, (r2 * r2 * e2 - r1 * r1 * e1) / d};
}

} // namespace

double eriksson_johnson_exact(double x, double y, double eps, std::span<const double> C) {
    double u = 0.0;
    for (std::size_t i = 0; i < C.size(); ++i) {
        if (C[i] == 0.0) continue;
        const int n = static_cast<int>(i) + 1;
        u += C[i] * ej_profile(x, eps, n)[0] * std::cos(n * kPi * y);
    }
    return u;
}

Vec2 eriksson_johnson_gradient(double x, double y, double eps, std::span<const double> C) {
    Vec2 g;
    for (std::size_t i = 0; i < C.size(); ++i) {
        if (C[i] == 0.0) continue;
        const int n = static_cast<int>(i) + 1;
        const auto X = ej_profile(x, eps, n);
        g.x += C[i] * X[1] * std::cos(n * kPi * y);
        g.y -= C[i] * X[0] * n * kPi * std::sin(n * kPi * y);
    }
    return g;
}

double eriksson_johnson_laplacian(double x, double y, double eps, std::span<const double> C) {
    double l = 0.0;
    for (std::size_t i = 0; i < C.size(); ++i) {
        if (C[i] == 0.0) continue;
        const int n = static_cast<int>(i) + 1;
        const auto X = ej_profile(x, eps, n);
        l += C[i] * (X[2] - n * n * kPi * kPi * X[0]) * std::cos(n * kPi * y);
    }
    return l;
}

EjBenchmark eriksson_johnson_benchmark(double eps) {
    EjBenchmark b;
    b.eps = eps;
    // the first-mode profile decreases monotonically from x = 0 to x = 1
    b.scale = std::abs(ej_profile(0.0, eps, 1)[0]);
    return b;
}

double EjBenchmark::value(double x, double y) const {
    const double c[1] = {1.0};
    return 0.5 + eriksson_johnson_exact(x, y, eps, c) / (2.0 * scale);
}

Vec2 EjBenchmark::gradient(double x, double y) const {
    const double c[1] = {1.0};
    const Vec2 g = eriksson_johnson_gradient(x, y, eps, c);
    return {g.x / (2.0 * scale), g.y / (2.0 * scale)};
}

} // namespace lvpp
