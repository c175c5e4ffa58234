#include "lvpp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "lvpp/error.hpp"

namespace lvpp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_finite(const Vector& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw NonConvergence(std::string("non-finite values in ") + what);
}

Vector difference(const Vector& a, const Vector& b) {
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

} // namespace

const char* to_string(ElementPair p) {
    return p == ElementPair::BubbleP0 ? "P1-bubble/P0-broken" : "P1/P1-lumped";
}

int count_linear_solves(const SolveReport& report) { return report.total_linear_solves; }

Mesh make_domain_mesh(DomainKind domain, int level) {
    if (level < 0) throw ConfigError("mesh level must be >= 0");
    switch (domain) {
    case DomainKind::Square: return unit_square_mesh(2 << level);
    case DomainKind::Disk: return disk_mesh(level);
    case DomainKind::Strip: return strip_mesh(1 << level);
    }
    throw ConfigError("unknown domain");
}

ObstacleSolver::ObstacleSolver(const Mesh& mesh, ObstacleProblem problem, ObstacleOptions options)
    : problem_(std::move(problem)),
      opts_(options),
      mesh_(&mesh),
      V_(mesh, options.pair == ElementPair::BubbleP0 ? SpaceKind::P1Bubble : SpaceKind::P1Nodal),
      W_(mesh, options.pair == ElementPair::BubbleP0 ? SpaceKind::P0Broken : SpaceKind::P1Nodal) {
    if (!(opts_.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!problem_.f || !problem_.phi || !problem_.g) throw ConfigError("obstacle problem lacks f, phi or g");
    if (problem_.domain == DomainKind::Strip) {
        V_.set_dirichlet(problem_.g, {tag::kLeft, tag::kRight});
    } else {
        V_.set_dirichlet(problem_.g);
    }
    const bool lumped = opts_.pair == ElementPair::LumpedP1;
    K_ = assemble_stiffness(V_);
    M_ = assemble_mass(V_, kNonlinearQuadrature);
    B_ = assemble_coupling(V_, W_, lumped);
    F_ = assemble_load(V_, problem_.f);
    if (lumped) {
        wmass_ = lumped_mass(mesh);
        phi_w_.resize(mesh.num_vertices());
        phi_mom_.resize(mesh.num_vertices());
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            phi_w_[v] = problem_.phi(mesh.vertices[v].x, mesh.vertices[v].y);
            phi_mom_[v] = wmass_[v] * phi_w_[v];
        }
    } else {
        wmass_.resize(mesh.num_cells());
        for (int c = 0; c < mesh.num_cells(); ++c) wmass_[c] = mesh.cell_area(c);
        phi_w_ = interpolate(W_, problem_.phi); // cell means
        phi_mom_.resize(mesh.num_cells());
        for (int c = 0; c < mesh.num_cells(); ++c) phi_mom_[c] = wmass_[c] * phi_w_[c];
    }
}

LatentState ObstacleSolver::initial_state() const {
    LatentState s;
    s.u.assign(V_.ndofs(), 0.0);
    s.psi.assign(W_.ndofs(), 0.0);
    s.lambda.assign(W_.ndofs(), 0.0);
    return s;
}

NewtonResult ObstacleSolver::newton_subproblem(Vector& u, Vector& psi, double alpha, const Vector& psi_prev,
                                               double tol_newton, int max_it, int* lin_solves) const {
    if (!(alpha > 0.0)) throw ConfigError("newton_subproblem: alpha must be positive");
    const int nW = W_.ndofs();
    SaddleSystem sys;
    sys.A = K_;
    sys.A.scale(alpha);
    sys.B = B_;
    sys.dirichlet = V_.dirichlet_mask();
    sys.dirichlet_values = V_.dirichlet_values();
    sys.C.resize(nW);
    sys.rhs_W.resize(nW);
    NewtonResult res;
    Vector diff(nW);
    for (int it = 1; it <= max_it; ++it) {
        for (int j = 0; j < nW; ++j) {
            const double e = entropy::safe_exp(psi[j]);
            sys.C[j] = (e + opts_.epsilon) * wmass_[j];
            sys.rhs_W[j] = phi_mom_[j] + wmass_[j] * e;
            diff[j] = psi_prev[j] - psi[j];
        }
        sys.rhs_V = B_.multiply(diff);
        for (std::size_t i = 0; i < F_.size(); ++i) sys.rhs_V[i] += alpha * F_[i];
        const SaddleSolution sol = condense_and_solve(sys, opts_.linear, lin_solves);
        require_finite(sol.u, "u");
        require_finite(sol.delta, "psi update");
        res.last_step = norm_l2(difference(sol.u, u));
        u = sol.u;
        for (int j = 0; j < nW; ++j) {
            const double d = sol.delta[j];
            if (opts_.limit_latent_step && d > 1.0) {
                // e^psi + (e^psi + eps) d is the primal value the linearization aims for
                const double e = entropy::safe_exp(psi[j]);
                const double t = e * (1.0 + d) + opts_.epsilon * d;
                psi[j] = std::min(psi[j] + d, std::log(t));
            } else {
                psi[j] += d;
            }
        }
        res.iterations = it;
        if (res.last_step <= tol_newton) return res;
    }
    throw NonConvergence("newton_subproblem: no convergence in " + std::to_string(max_it) +
                         " iterations (last step " + std::to_string(res.last_step) + ")");
}

double ObstacleSolver::norm_l2(const Vector& d) const { return std::sqrt(std::max(0.0, dot(d, M_.multiply(d)))); }

double ObstacleSolver::seminorm_h1(const Vector& d) const {
    return std::sqrt(std::max(0.0, dot(d, K_.multiply(d))));
}

double ObstacleSolver::norm_h1(const Vector& d) const {
    return std::sqrt(std::max(0.0, dot(d, K_.multiply(d)) + dot(d, M_.multiply(d))));
}

double ObstacleSolver::energy(const Vector& u) const { return 0.5 * dot(u, K_.multiply(u)) - dot(F_, u); }

double ObstacleSolver::latent_primal(const Vector& psi, int c, const Bary& b) const {
    const Vec2 x = map_point(*mesh_, c, b);
    const double p = W_.kind() == SpaceKind::P0Broken ? psi[c] : evaluate(W_, psi, c, b);
    return problem_.phi(x.x, x.y) + entropy::safe_exp(p);
}

void ObstacleSolver::track_properties(const Vector& u, const Vector& psi, SolveReport& report) const {
    // u~ - phi = exp(psi_h) pointwise; the minimum over a cell is attained at a dof for P0 and P1.
    for (double p : psi) report.min_latent_gap = std::min(report.min_latent_gap, entropy::safe_exp(p));
    if (W_.kind() == SpaceKind::P0Broken) {
        const Vector btu = B_.multiply_transpose(u);
        for (int c = 0; c < W_.ndofs(); ++c)
            report.min_cell_average = std::min(report.min_cell_average, btu[c] / wmass_[c] - phi_w_[c]);
    }
}

SolveReport ObstacleSolver::lvpp_obstacle(StepSchedule& schedule) const {
    return lvpp_obstacle(schedule, initial_state());
}

SolveReport ObstacleSolver::lvpp_obstacle(StepSchedule& schedule, LatentState init) const {
    const auto t0 = Clock::now();
    SolveReport rep;
    rep.state = std::move(init);
    LatentState& st = rep.state;
    double tol_newton = opts_.tol_newton0 > 0.0 ? opts_.tol_newton0 : 1e-2 * mesh_->diameter();
    if (opts_.tol_newton_fixed > 0.0) tol_newton = opts_.tol_newton_fixed;
    if (opts_.keep_history) rep.u_history.push_back(st.u);
    double prev_energy = std::numeric_limits<double>::quiet_NaN();
    for (int k = 1; k <= opts_.max_outer; ++k) {
        const double alpha = schedule.next_alpha();
        const Vector u_prev = st.u;
        const Vector psi_prev = st.psi;
        NewtonResult nr;
        try {
            nr = newton_subproblem(st.u, st.psi, alpha, psi_prev, tol_newton, opts_.max_newton,
                                   &rep.total_linear_solves);
        } catch (const NonConvergence& e) {
            throw NonConvergence("outer iteration " + std::to_string(k) + " (alpha = " + std::to_string(alpha) +
                                 "): " + e.what());
        }
        rep.total_newton += nr.iterations;
        const Vector d = difference(st.u, u_prev);
        IterationRow row;
        row.k = k;
        row.alpha = alpha;
        row.inc_l2 = norm_l2(d);
        row.inc_h1 = norm_h1(d);
        row.newton_its = nr.iterations;
        row.lin_solves = rep.total_linear_solves;
        row.energy = energy(st.u);
        if (problem_.has_exact() && problem_.exact_grad) {
            const auto e = compute_error_norms(V_, st.u, problem_.exact_u, problem_.exact_grad);
            row.err_h1 = std::hypot(e.L2, e.H1_semi);
        }
        for (std::size_t j = 0; j < st.psi.size(); ++j) st.lambda[j] = (psi_prev[j] - st.psi[j]) / alpha;
        st.k = k;
        st.alpha = alpha;
        st.increments.emplace_back(row.inc_h1, row.inc_l2);
        st.energies.push_back(row.energy);
        if (std::isfinite(prev_energy)) rep.max_energy_increase = std::max(rep.max_energy_increase, row.energy - prev_energy);
        prev_energy = row.energy;
        track_properties(st.u, st.psi, rep);
        if (opts_.keep_history) rep.u_history.push_back(st.u);
        rep.rows.push_back(row);
        if (opts_.tol_newton_fixed <= 0.0) tol_newton = row.inc_l2;
        if (row.inc_l2 < opts_.tol_exit) {
            rep.converged = true;
            break;
        }
    }
    if (problem_.has_exact()) {
        rep.u_error = compute_error_norms(V_, st.u, problem_.exact_u, problem_.exact_grad);
        ErrorNorms ut;
        ut.L2 = utilde_l2_error(st.psi);
        rep.utilde_error = ut;
        if (problem_.exact_lambda) rep.lambda_l2_error = lambda_l2_error(st.lambda);
    }
    rep.kkt = check_kkt(st.u, st.lambda);
    if (W_.kind() == SpaceKind::P0Broken) {
        const Vector btu = B_.multiply_transpose(st.u);
        for (int c = 0; c < W_.ndofs(); ++c)
            rep.final_min_cell_average = std::min(rep.final_min_cell_average, btu[c] / wmass_[c] - phi_w_[c]);
    }
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

KktResiduals ObstacleSolver::check_kkt(const Vector& u, const Vector& lambda) const {
    KktResiduals r;
    const Vector btu = B_.multiply_transpose(u);
    double comp = 0.0, dual = 0.0;
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        comp += lambda[j] * btu[j];
        dual += wmass_[j] * std::max(-lambda[j], 0.0);
    }
    r.complementarity = std::abs(comp);
    r.dual_infeas = dual;
    const auto& q = triangle_rule(kNonlinearQuadrature);
    double primal = 0.0;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const double area = mesh_->cell_area(c);
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
            const Vec2 x = map_point(*mesh_, c, q.points[iq]);
            const double gap = evaluate(V_, u, c, q.points[iq]) - problem_.phi(x.x, x.y);
            primal += 2.0 * q.weights[iq] * area * std::max(-gap, 0.0);
        }
    }
    r.primal_infeas = primal;
    return r;
}

double ObstacleSolver::compute_hminus1_norm(const Vector& w) const {
    if (static_cast<int>(w.size()) != W_.ndofs()) throw std::invalid_argument("compute_hminus1_norm: size mismatch");
    Vector rhs = B_.multiply(w);
    const Vector zero(V_.ndofs(), 0.0);
    const SparseMatrix A = apply_dirichlet(K_, rhs, V_.dirichlet_mask(), zero);
    const Vector r = solve_spd(A, rhs, opts_.linear);
    return std::sqrt(std::max(0.0, dot(r, K_.multiply(r))));
}

double ObstacleSolver::utilde_l2_error(const Vector& psi) const {
    const auto& q = triangle_rule(kNonlinearQuadrature);
    double s = 0.0;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const double area = mesh_->cell_area(c);
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
            const Vec2 x = map_point(*mesh_, c, q.points[iq]);
            const double d = problem_.exact_u(x.x, x.y) - latent_primal(psi, c, q.points[iq]);
            s += 2.0 * q.weights[iq] * area * d * d;
        }
    }
    return std::sqrt(s);
}

double ObstacleSolver::lambda_l2_error(const Vector& lambda) const {
    const auto& q = triangle_rule(kNonlinearQuadrature);
    double s = 0.0;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const double area = mesh_->cell_area(c);
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
            const Vec2 x = map_point(*mesh_, c, q.points[iq]);
            const double lh = W_.kind() == SpaceKind::P0Broken ? lambda[c] : evaluate(W_, lambda, c, q.points[iq]);
            const double d = problem_.exact_lambda(x.x, x.y) - lh;
            s += 2.0 * q.weights[iq] * area * d * d;
        }
    }
    return std::sqrt(s);
}

EntropicPoissonResult solve_entropic_poisson(const ObstacleSolver& disc, double theta, double tol, int max_it) {
    if (!(theta > 0.0)) throw ConfigError("solve_entropic_poisson: temperature must be positive");
    LatentState s = disc.initial_state();
    const Vector prior(s.psi.size(), 0.0);
    EntropicPoissonResult r;
    r.newton_its = disc.newton_subproblem(s.u, s.psi, 1.0 / theta, prior, tol, max_it).iterations;
    r.u = std::move(s.u);
    r.psi = std::move(s.psi);
    return r;
}

AdvDiffReport lvpp_advection_diffusion(const Mesh& mesh, const PointFn& f, const PointFn& g, StepSchedule& schedule,
                                       const AdvDiffOptions& opts, const PointFn& exact) {
    const auto t0 = Clock::now();
    if (!(opts.rho > 0.0) || !(opts.eps_diff > 0.0)) throw ConfigError("advection-diffusion: rho and eps must be positive");
    FeSpace V(mesh, SpaceKind::P1Nodal);
    FeSpace W(mesh, SpaceKind::P1Nodal);
    V.set_dirichlet(g);
    const int n = V.ndofs();
    const SparseMatrix K = assemble_stiffness(V);
    // (beta . grad phi_j, phi_i)
    std::vector<Triplet> adv;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto geo = cell_geometry(mesh, c);
        const auto& t = mesh.cells[c];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                adv.push_back({t[i], t[j], (opts.beta.x * geo.grad[j].x + opts.beta.y * geo.grad[j].y) * geo.area / 3.0});
    }
    const SparseMatrix Adv = SparseMatrix::from_triplets(n, n, std::move(adv));
    const Vector F = assemble_load(V, f);
    const Vector m = lumped_mass(mesh);
    const SparseMatrix B = assemble_coupling(V, W, opts.lumped);
    if (!opts.lumped) throw ConfigError("advection-diffusion: only the lumped (P1, P1) pair is implemented");

    AdvDiffReport rep;
    {
        Vector rhs = F;
        const SparseMatrix A = apply_dirichlet(add(K, Adv, opts.eps_diff, 1.0), rhs, V.dirichlet_mask(), V.dirichlet_values());
        rep.galerkin = solve_general(A, rhs);
    }
    const auto [gmin, gmax] = std::minmax_element(rep.galerkin.begin(), rep.galerkin.end());
    rep.galerkin_min = *gmin;
    rep.galerkin_max = *gmax;

    auto clamp01 = [&](double v) { return std::clamp(v, opts.boundary_clamp, 1.0 - opts.boundary_clamp); };
    Vector u = rep.galerkin;
    Vector psi(n);
    for (int i = 0; i < n; ++i) psi[i] = entropy::lnit(clamp01(u[i]));
    std::vector<char> fixed = V.dirichlet_mask();

    const auto l2_lumped = [&](const Vector& d) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += m[i] * d[i] * d[i];
        return std::sqrt(s);
    };

    for (int k = 1; k <= opts.iterations; ++k) {
        const double alpha = schedule.next_alpha();
        const Vector uk = u, psik = psi;
        // alpha L(u^k, v) + (psi^k, v)
        Vector base = K.multiply(uk);
        const Vector au = Adv.multiply(uk);
        for (int i = 0; i < n; ++i) base[i] = alpha * ((1.0 / opts.rho - opts.eps_diff) * base[i] - au[i] + F[i]);
        SaddleSystem sys;
        sys.A = K;
        sys.A.scale(alpha / opts.rho);
        sys.B = B;
        sys.dirichlet = V.dirichlet_mask();
        sys.dirichlet_values = V.dirichlet_values();
        sys.fixed_W = fixed;
        sys.C.resize(n);
        sys.rhs_W.resize(n);
        int its = 0;
        double step = 0.0;
        for (its = 1; its <= opts.max_newton; ++its) {
            Vector dpsi(n);
            for (int i = 0; i < n; ++i) {
                sys.C[i] = m[i] * (entropy::sigmoid_prime(psi[i]) + opts.epsilon);
                sys.rhs_W[i] = m[i] * entropy::sigmoid(psi[i]);
                dpsi[i] = psik[i] - psi[i];
            }
            sys.rhs_V = B.multiply(dpsi);
            for (int i = 0; i < n; ++i) sys.rhs_V[i] += base[i];
            const SaddleSolution sol = condense_and_solve(sys, opts.linear, &rep.total_linear_solves);
            require_finite(sol.u, "u");
            require_finite(sol.delta, "psi update");
            step = l2_lumped(difference(sol.u, u));
            u = sol.u;
            for (int i = 0; i < n; ++i) psi[i] += sol.delta[i];
            if (step <= opts.newton_tol) break;
        }
        if (its > opts.max_newton) throw NonConvergence("advection-diffusion: Newton did not converge at iteration " + std::to_string(k));
        IterationRow row;
        row.k = k;
        row.alpha = alpha;
        const Vector d = difference(u, uk);
        row.inc_l2 = l2_lumped(d);
        row.inc_h1 = std::sqrt(row.inc_l2 * row.inc_l2 + dot(d, K.multiply(d)));
        row.newton_its = std::min(its, opts.max_newton);
        row.lin_solves = rep.total_linear_solves;
        rep.rows.push_back(row);
    }
    rep.u = u;
    rep.psi = psi;

    const auto [umin, umax] = std::minmax_element(u.begin(), u.end());
    rep.nodal_u_min = *umin;
    rep.nodal_u_max = *umax;
    for (int i = 0; i < n; ++i) {
        if (V.dirichlet_mask()[i]) continue;
        rep.nodal_feasibility_gap = std::max(rep.nodal_feasibility_gap, std::abs(u[i] - entropy::sigmoid(psi[i])));
    }
    rep.utilde_min = 1.0;
    rep.utilde_max = 0.0;
    const auto& q = triangle_rule(kNonlinearQuadrature);
    double eg = 0.0, et = 0.0, eu = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double area = mesh.cell_area(c);
        auto sample = [&](const Bary& b, double w) {
            const double ut = entropy::sigmoid(evaluate(W, psi, c, b));
            rep.utilde_min = std::min(rep.utilde_min, ut);
            rep.utilde_max = std::max(rep.utilde_max, ut);
            if (ut < 0.0 || ut > 1.0) ++rep.utilde_violations;
            if (exact && w > 0.0) {
                const Vec2 x = map_point(mesh, c, b);
                const double ex = exact(x.x, x.y);
                const double dg = ex - evaluate(V, rep.galerkin, c, b);
                const double dt = ex - ut;
                const double du = ex - evaluate(V, u, c, b);
                eg += w * dg * dg;
                et += w * dt * dt;
                eu += w * du * du;
            }
        };
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) sample(q.points[iq], 2.0 * q.weights[iq] * area);
        for (const auto& b : vertex_rule().points) sample(b, 0.0);
    }
    rep.galerkin_l2_error = std::sqrt(eg);
    rep.utilde_l2_error = std::sqrt(et);
    rep.u_l2_error = std::sqrt(eu);
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

double volume_shift(const entropy::EntropyKind& kind, const Vector& psi, const Vector& measure, double target,
                    double tol) {
    const std::size_t n = psi.size();
    auto w = [&](std::size_t j) { return measure.empty() ? 1.0 : measure[j]; };
    if (std::holds_alternative<entropy::Boltzmann>(kind)) {
        const auto& b = std::get<entropy::Boltzmann>(kind);
        if (b.shift) throw ConfigError("volume_shift: shifted Boltzmann entropy is not supported");
        // sum w e^{psi + c} = target
        double mx = -std::numeric_limits<double>::infinity();
        for (double p : psi) mx = std::max(mx, p);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += w(j) * std::exp(psi[j] - mx);
        if (!(target > 0.0)) throw DomainError("volume_shift: target must be positive");
        return std::log(target / s) - mx;
    }
    auto volume = [&](double c) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += w(j) * entropy::gradient_inverse(kind, psi[j] + c, 0.0, 0.0);
        return s;
    };
    double lo = -1.0, hi = 1.0;
    int guard = 0;
    while (volume(lo) > target) {
        lo *= 2.0;
        if (++guard > 60) throw NonConvergence("volume_shift: cannot bracket the target from below");
    }
    guard = 0;
    while (volume(hi) < target) {
        hi *= 2.0;
        if (++guard > 60) throw NonConvergence("volume_shift: cannot bracket the target from above");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += w(j);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = volume(mid);
        if (std::abs(v - target) <= tol * total) return mid;
        (v < target ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) return mid;
    }
    return 0.5 * (lo + hi);
}

MirrorDescentHistory mirror_descent(const GradientOracle& grad, const entropy::EntropyKind& kind, const Vector& psi0,
                                    const Vector& measure, StepSchedule& schedule, const MirrorDescentOptions& opts) {
    MirrorDescentHistory h;
    const std::size_t n = psi0.size();
    auto w = [&](std::size_t j) { return measure.empty() ? 1.0 : measure[j]; };
    auto primal = [&](const Vector& psi) {
        Vector p(n);
        for (std::size_t j = 0; j < n; ++j) p[j] = entropy::gradient_inverse(kind, psi[j], 0.0, 0.0);
        return p;
    };
    Vector psi = psi0;
    h.psi.push_back(psi);
    Vector rho = primal(psi);
    for (int k = 0; k < opts.max_iterations; ++k) {
        double obj = 0.0;
        const Vector gr = grad(rho, &obj);
        h.objective.push_back(obj);
        const double alpha = schedule.next_alpha();
        for (std::size_t j = 0; j < n; ++j) psi[j] -= alpha * gr[j];
        double c = 0.0;
        if (!std::isnan(opts.volume_target)) {
            c = volume_shift(kind, psi, measure, opts.volume_target, opts.bisection_tol);
            for (auto& p : psi) p += c;
        }
        const Vector rho_new = primal(psi);
        double l1 = 0.0;
        for (std::size_t j = 0; j < n; ++j) l1 += w(j) * std::abs(rho_new[j] - rho[j]);
        rho = rho_new;
        h.psi.push_back(psi);
        h.alpha.push_back(alpha);
        h.shift.push_back(c);
        h.eta.push_back(l1 / alpha);
        if (l1 <= std::min(alpha * opts.ntol, opts.itol)) {
            h.converged = true;
            break;
        }
    }
    return h;
}

} // namespace lvpp
