#pragma once

#include <span>
#include <string>
#include <vector>

#include "lvpp/fespace.hpp"
#include "lvpp/mesh.hpp"
#include "lvpp/types.hpp"

namespace lvpp {

enum class DomainKind { Square, Disk, Strip };

struct ObstacleProblem {
    std::string name;
    DomainKind domain = DomainKind::Square;
    PointFn f;
    PointFn phi;
    PointFn g;
    // Optional exact data.
    PointFn exact_u;
    GradFn exact_grad;
    PointFn exact_lambda;
    bool has_exact() const { return static_cast<bool>(exact_u); }
};

// u = x^4 (x >= 0), 0 otherwise; phi = 0; lambda = 0.
ObstacleProblem biactive_problem();
// f = 2 pi^2 sin(pi x) sin(pi y), phi = g = 0; no closed form.
ObstacleProblem strict_complementarity_problem();
// u = (1 - 4 r^2)^4 inside r < 1/2, lambda = 1 where r^2 > 3/4.
ObstacleProblem nonsmooth_multiplier_problem();
// Hemisphere of radius 1/2 on the unit disk with f = g = 0.
ObstacleProblem spherical_obstacle_problem();
// f = 0, g = 1, phi = 0: the constant 1 is the solution.
ObstacleProblem constant_problem();
// 1D profile on the unit strip: -u'' = c, u(0) = u(1) = 1, u >= 0 (c < 0).
ObstacleProblem strip_parabola_problem(double c = -16.0);

ObstacleProblem obstacle_problem_by_name(const std::string& name);
std::vector<std::string> obstacle_problem_names();

// w e^w = z on branch 0 (z >= -1/e) or -1 (-1/e <= z < 0).
double lambert_w_branch(double z, int branch);

struct SphericalConstants {
    double a = 0.0; // contact radius
    double A = 0.0; // coefficient of ln r outside the contact disk
};
SphericalConstants spherical_constants();

// Obstacle used outside the cap: tangent line continued from r = 0.9 / 2.
double spherical_obstacle(double x, double y);

struct EjRoots {
    double r1 = 0.0;
    double r2 = 0.0;
};
EjRoots eriksson_johnson_roots(double eps, int n);

// Truncated series with amplitudes C[n-1] for modes n = 1, 2, ...
double eriksson_johnson_exact(double x, double y, double eps, std::span<const double> C);
Vec2 eriksson_johnson_gradient(double x, double y, double eps, std::span<const double> C);
double eriksson_johnson_laplacian(double x, double y, double eps, std::span<const double> C);

// First mode rescaled affinely onto [0, 1]: 1/2 + u / (2 max |u|).
struct EjBenchmark {
    double eps = 1e-2;
    double scale = 1.0; // max |u| of the raw mode
    double value(double x, double y) const;
    Vec2 gradient(double x, double y) const;
};
EjBenchmark eriksson_johnson_benchmark(double eps);

} // namespace lvpp
