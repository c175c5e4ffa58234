#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lvpp/entropy.hpp"
#include "lvpp/fespace.hpp"
#include "lvpp/linalg.hpp"
#include "lvpp/problems.hpp"
#include "lvpp/schedules.hpp"

namespace lvpp {

enum class ElementPair {
    BubbleP0, // (P1-bubble, P0-broken)
    LumpedP1, // (P1, P1) with vertex-rule lumping
};

const char* to_string(ElementPair p);

struct IterationRow {
    int k = 0;
    double alpha = 0.0;
    double inc_h1 = 0.0;
    double inc_l2 = 0.0;
    int newton_its = 0;
    int lin_solves = 0; // cumulative
    double energy = 0.0;
    double err_h1 = std::numeric_limits<double>::quiet_NaN();
};

struct KktResiduals {
    double complementarity = 0.0;
    double primal_infeas = 0.0;
    double dual_infeas = 0.0;
};

// u^k, psi^k and lambda^k with the outer-iteration bookkeeping.
struct LatentState {
    Vector u;
    Vector psi;
    Vector lambda;
    int k = 0;
    double alpha = 0.0;
    std::vector<std::pair<double, double>> increments; // (H1, L2)
    std::vector<double> energies;
};

struct SolveReport {
    std::vector<IterationRow> rows;
    int total_linear_solves = 0;
    int total_newton = 0;
    bool converged = false;
    double wall_seconds = 0.0;
    LatentState state;
    std::optional<ErrorNorms> u_error;      // u_h against the exact solution
    std::optional<ErrorNorms> utilde_error; // phi + exp(psi_h) against the exact solution
    double lambda_l2_error = std::numeric_limits<double>::quiet_NaN();
    std::optional<KktResiduals> kkt;
    // Minimum of (u~ - phi) over quadrature points of all iterates.
    double min_latent_gap = std::numeric_limits<double>::infinity();
    // Minimum over iterates and cells of the cell mean of (u_h - phi_h) (P0 latent space only).
    double min_cell_average = std::numeric_limits<double>::infinity();
    // Same, for the returned iterate only.
    double final_min_cell_average = std::numeric_limits<double>::infinity();
    // Largest E(u^{k+1}) - E(u^k) seen.
    double max_energy_increase = -std::numeric_limits<double>::infinity();
    std::vector<Vector> u_history; // filled when requested
};

int count_linear_solves(const SolveReport& report);

struct ObstacleOptions {
    ElementPair pair = ElementPair::BubbleP0;
    double epsilon = 1e-6;
    double tol_exit = 1e-6;
    double tol_newton0 = -1.0; // <= 0 selects 1e-2 * domain diameter
    // > 0: inner tolerance for every subproblem instead of the last outer increment
    double tol_newton_fixed = -1.0;
    int max_outer = 500;
    int max_newton = 100;
    // Caps an upward latent step at the log of its linearized primal value.
    bool limit_latent_step = true;
    bool keep_history = false;
    SolveOptions linear;
};

struct NewtonResult {
    int iterations = 0;
    double last_step = 0.0;
};

// Discretization of one obstacle problem on one mesh.
class ObstacleSolver {
public:
    ObstacleSolver(const Mesh& mesh, ObstacleProblem problem, ObstacleOptions options = {});

    const FeSpace& V() const { return V_; }
    const FeSpace& W() const { return W_; }
    const ObstacleProblem& problem() const { return problem_; }
    const ObstacleOptions& options() const { return opts_; }
    const SparseMatrix& stiffness() const { return K_; }
    const SparseMatrix& mass() const { return M_; }
    const SparseMatrix& coupling() const { return B_; }
    const Vector& load() const { return F_; }
    const Vector& latent_measure() const { return wmass_; }

    // Initial state: u = 0 (boundary included), psi = 0.
    LatentState initial_state() const;

    // Quasi-Newton solve of one proximal subproblem with prior psi_prev.
    // Updates u, psi in place. Throws NonConvergence.
    NewtonResult newton_subproblem(Vector& u, Vector& psi, double alpha, const Vector& psi_prev,
                                   double tol_newton, int max_it, int* lin_solves = nullptr) const;

    SolveReport lvpp_obstacle(StepSchedule& schedule) const;
    SolveReport lvpp_obstacle(StepSchedule& schedule, LatentState init) const;

    double norm_l2(const Vector& d) const;
    double norm_h1(const Vector& d) const; // full H1 norm
    double seminorm_h1(const Vector& d) const;
    double energy(const Vector& u) const;
    // phi + exp(psi) at a point of cell c.
    double latent_primal(const Vector& psi, int c, const Bary& b) const;
    KktResiduals check_kkt(const Vector& u, const Vector& lambda) const;
    // Discrete H^{-1} norm of a latent-space field: ||grad r|| with (grad r, grad v) = (w, v).
    double compute_hminus1_norm(const Vector& w) const;
    // L2 error of phi + exp(psi_h) against exact.
    double utilde_l2_error(const Vector& psi) const;
    double lambda_l2_error(const Vector& lambda) const;

private:
    void track_properties(const Vector& u, const Vector& psi, SolveReport& report) const;

    ObstacleProblem problem_;
    ObstacleOptions opts_;
    const Mesh* mesh_;
    FeSpace V_;
    FeSpace W_;
    SparseMatrix K_;
    SparseMatrix M_;
    SparseMatrix B_;
    Vector F_;
    Vector wmass_;   // |T| or lumped nodal mass
    Vector phi_mom_; // (phi, w_j)
    Vector phi_w_;   // phi at latent nodes (lumped) or cell mean (P0)
};

Mesh make_domain_mesh(DomainKind domain, int level);

// One nonlinear solve of (grad u, grad v) + theta (ln u, v) = (f, v), u = g on Dirichlet tags.
struct EntropicPoissonResult {
    Vector u;
    Vector psi;
    int newton_its = 0;
};
EntropicPoissonResult solve_entropic_poisson(const ObstacleSolver& disc, double theta, double tol = 1e-10,
                                             int max_it = 500);

struct AdvDiffOptions {
    double eps_diff = 1e-2;
    Vec2 beta{1.0, 0.0};
    double rho = 1.0;
    int iterations = 2;
    double epsilon = 1e-6; // Hessian regularization
    double newton_tol = 1e-10;
    int max_newton = 100;
    double boundary_clamp = 1e-10;
    bool lumped = true;
    SolveOptions linear;
};

struct AdvDiffReport {
    Vector galerkin; // plain Galerkin nodal values
    Vector u;        // final primal nodal values
    Vector psi;      // final latent nodal values
    double galerkin_min = 0.0;
    double galerkin_max = 0.0;
    double utilde_min = 0.0; // sampled sigmoid(psi_h)
    double utilde_max = 0.0;
    int utilde_violations = 0;
    double nodal_u_min = 0.0;
    double nodal_u_max = 0.0;
    double nodal_feasibility_gap = 0.0; // max |u_i - sigmoid(psi_i)|
    double galerkin_l2_error = 0.0;
    double utilde_l2_error = 0.0;
    double u_l2_error = 0.0;
    std::vector<IterationRow> rows;
    int total_linear_solves = 0;
    double wall_seconds = 0.0;
};

// Proximal Galerkin for -eps lap u + beta . grad u = f with 0 <= u <= 1, u = g on the boundary.
AdvDiffReport lvpp_advection_diffusion(const Mesh& mesh, const PointFn& f, const PointFn& g,
                                       StepSchedule& schedule, const AdvDiffOptions& opts,
                                       const PointFn& exact = {});

struct MirrorDescentOptions {
    double itol = 1e-2;
    double ntol = 1e-5;
    int max_iterations = 500;
    // Equality sum_j m_j G'^{-1}(psi_j + c) = volume_target; NaN disables it.
    double volume_target = std::numeric_limits<double>::quiet_NaN();
    double bisection_tol = 1e-12;
};

struct MirrorDescentHistory {
    std::vector<Vector> psi;    // psi^0, psi^1, ...
    std::vector<double> alpha;  // alpha_1, alpha_2, ...
    std::vector<double> eta;    // ||rho^k - rho^{k-1}||_1 / alpha_k
    std::vector<double> shift;  // constant c added after each half step
    std::vector<double> objective;
    bool converged = false;
};

// Gradient oracle: returns the latent-space gradient of the objective at the primal point.
using GradientOracle = std::function<Vector(const Vector& primal, double* objective)>;

// Half-step entropic mirror descent. measure holds the quadrature weight of each latent dof
// (empty = unit weights) and defines both the L1 stopping norm and the equality constraint.
MirrorDescentHistory mirror_descent(const GradientOracle& grad, const entropy::EntropyKind& kind,
                                    const Vector& psi0, const Vector& measure, StepSchedule& schedule,
                                    const MirrorDescentOptions& opts);

// Solves sum_j m_j G'^{-1}(psi_j + c) = target for c (closed form for Boltzmann, bisection otherwise).
double volume_shift(const entropy::EntropyKind& kind, const Vector& psi, const Vector& measure, double target,
                    double tol = 1e-12);

} // namespace lvpp
