#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lvpp/fespace.hpp"
#include "lvpp/linalg.hpp"
#include "lvpp/mesh.hpp"
#include "lvpp/schedules.hpp"

namespace lvpp {

struct LoadSpec {
    enum class Kind {
        BodyDisk,  // body force on a disk
        Traction,  // traction on the kLoad boundary segment
    };
    Kind kind = Kind::BodyDisk;
    Vec2 force{0.0, -1.0};
    Vec2 center{2.9, 0.5};
    double radius = 0.05;
};

struct TopOptProblem {
    double lame_lambda = 1.0;
    double lame_mu = 1.0;
    double rho_min = 1e-6;
    double theta = 0.5;      // volume fraction
    double filter_radius = 0.02;
    LoadSpec load;
};

// r(t) = rho_min + t^3 (1 - rho_min), t clamped to [0, 1]
double simp(double t, double rho_min);
double simp_prime(double t, double rho_min);

struct TopOptIteration {
    int k = 0;
    double alpha = 0.0;
    double eta = 0.0;         // ||rho^k - rho^{k-1}||_L1 / alpha_k
    double increment_l1 = 0.0;
    double compliance = 0.0;  // at rho^{k-1}
    double volume_error = 0.0;
    double shift = 0.0;
};

struct TopOptResult {
    std::vector<TopOptIteration> rows;
    Vector psi;        // P0 latent field
    Vector rho;        // sigmoid(psi)
    Vector rho_filtered;
    Vector displacement;
    double compliance = 0.0; // at the returned density
    bool converged = false;
    double wall_seconds = 0.0;
};

struct TopOptOptions {
    double itol = 1e-2;
    double ntol = 1e-5;
    int max_iterations = 200;
    double bisection_tol = 1e-12;
    // Called after each iteration with the new P0 density.
    std::function<void(const TopOptIteration&, const Vector&)> on_iterate;
};

// Elasticity, filter and gradient on one cantilever mesh. The density lives in P0,
// filtered density, displacement components and gradient in P1.
class Cantilever {
public:
    Cantilever(const Mesh& mesh, TopOptProblem problem);

    const Mesh& mesh() const { return *mesh_; }
    const TopOptProblem& problem() const { return problem_; }
    const Vector& cell_areas() const { return area_; }
    const Vector& load_vector() const { return load_; }

    // -eps^2 lap rho~ + rho~ = rho with natural boundary conditions.
    Vector helmholtz_filter(const Vector& rho_cells) const;
    // Interleaved (x, y) nodal displacement for a filtered density.
    Vector elasticity_solve(const Vector& rho_filtered) const;
    double compliance(const Vector& u) const;
    // Vector stiffness without boundary conditions.
    SparseMatrix elasticity_matrix(const Vector& rho_filtered) const;

    struct Evaluation {
        double compliance = 0.0;
        Vector rho_filtered;
        Vector displacement;
        Vector gradient; // P0: cell average of w~
        Vector w;        // P1 gradient field
    };
    Evaluation evaluate(const Vector& rho_cells) const;

private:
    const Mesh* mesh_;
    TopOptProblem problem_;
    FeSpace P1_;
    Vector area_;
    SparseMatrix filter_matrix_; // eps^2 K + M
    SpdFactorization filter_factor_;
    SparseMatrix cell_to_node_;  // (rho_T, phi_i)
    Vector load_;
    std::vector<char> fixed_;
    mutable SpdFactorization elastic_factor_;
};

TopOptResult topopt_solve(const Cantilever& model, StepSchedule& schedule, const TopOptOptions& opts = {});

} // namespace lvpp
