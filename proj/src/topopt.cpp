#include "lvpp/topopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lvpp/entropy.hpp"
#include "lvpp/error.hpp"
#include "lvpp/solver.hpp"

namespace lvpp {

// The filtered density can leave [0, 1] slightly; clamp so the stiffness stays >= rho_min.
double simp(double t, double rho_min) {
    t = std::clamp(t, 0.0, 1.0);
    return rho_min + t * t * t * (1.0 - rho_min);
}

double simp_prime(double t, double rho_min) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 3.0 * t * t * (1.0 - rho_min);
}

namespace {

constexpr int kTopOptQuadrature = 4;

// Engineering strain (exx, eyy, 2exy) of the cell from interleaved nodal displacements.
std::array<double, 3> cell_strain(const CellGeometry& g, const std::array<int, 3>& t, const Vector& u) {
    std::array<double, 3> e{0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a) {
        const double ux = u[2 * t[a]], uy = u[2 * t[a] + 1];
        e[0] += g.grad[a].x * ux;
        e[1] += g.grad[a].y * uy;
        e[2] += g.grad[a].y * ux + g.grad[a].x * uy;
    }
    return e;
}

// sigma(u) : grad u for unit stiffness.
double strain_energy_density(const std::array<double, 3>& e, double lam, double mu) {
    const double div = e[0] + e[1];
    return lam * div * div + 2.0 * mu * (e[0] * e[0] + e[1] * e[1] + 0.5 * e[2] * e[2]);
}

} // namespace

Cantilever::Cantilever(const Mesh& mesh, TopOptProblem problem)
    : mesh_(&mesh), problem_(problem), P1_(mesh, SpaceKind::P1Nodal) {
    if (!(problem_.rho_min > 0.0 && problem_.rho_min < 1.0)) throw ConfigError("rho_min must lie in (0, 1)");
    if (!(problem_.theta > 0.0 && problem_.theta < 1.0)) throw ConfigError("volume fraction must lie in (0, 1)");
    if (!(problem_.filter_radius > 0.0)) throw ConfigError("filter radius must be positive");
    const int nv = mesh.num_vertices();
    const int nc = mesh.num_cells();
    area_.resize(nc);
    for (int c = 0; c < nc; ++c) area_[c] = mesh.cell_area(c);

    const double e2 = problem_.filter_radius * problem_.filter_radius;
    filter_matrix_ = add(assemble_stiffness(P1_), assemble_mass(P1_, 2), e2, 1.0);
    filter_factor_.factorize(filter_matrix_);
    std::vector<Triplet> tr;
    tr.reserve(3 * nc);
    for (int c = 0; c < nc; ++c)
        for (int v : mesh.cells[c]) tr.push_back({v, c, area_[c] / 3.0});
    cell_to_node_ = SparseMatrix::from_triplets(nv, nc, std::move(tr));

    load_.assign(2 * nv, 0.0);
    const LoadSpec& L = problem_.load;
    if (L.kind == LoadSpec::Kind::BodyDisk) {
        const auto& q = triangle_rule(kTopOptQuadrature);
        for (int c = 0; c < nc; ++c) {
            for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
                const Vec2 x = map_point(mesh, c, q.points[iq]);
                const double dx = x.x - L.center.x, dy = x.y - L.center.y;
                if (dx * dx + dy * dy > L.radius * L.radius) continue;
                const double w = 2.0 * q.weights[iq] * area_[c];
                for (int a = 0; a < 3; ++a) {
                    const int v = mesh.cells[c][a];
                    load_[2 * v] += w * q.points[iq][a] * L.force.x;
                    load_[2 * v + 1] += w * q.points[iq][a] * L.force.y;
                }
            }
        }
    } else {
        for (const auto& e : mesh.boundary_edges) {
            if (e.tag != tag::kLoad) continue;
            const Vec2 pa = mesh.vertices[e.a], pb = mesh.vertices[e.b];
            const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
            for (int v : {e.a, e.b}) {
                load_[2 * v] += 0.5 * len * L.force.x;
                load_[2 * v + 1] += 0.5 * len * L.force.y;
            }
        }
    }
    double total = 0.0;
    for (double f : load_) total += std::abs(f);
    if (total == 0.0) throw ConfigError("cantilever load does not touch the mesh");

    const auto fixed_vertices = mesh.boundary_vertex_mask({tag::kFixed});
    fixed_.assign(2 * nv, 0);
    for (int v = 0; v < nv; ++v) fixed_[2 * v] = fixed_[2 * v + 1] = fixed_vertices[v];
}

Vector Cantilever::helmholtz_filter(const Vector& rho_cells) const {
    if (static_cast<int>(rho_cells.size()) != mesh_->num_cells()) throw std::invalid_argument("helmholtz_filter: size");
    return filter_factor_.solve(cell_to_node_.multiply(rho_cells));
}

SparseMatrix Cantilever::elasticity_matrix(const Vector& rho_filtered) const {
    const double lam = problem_.lame_lambda, mu = problem_.lame_mu;
    const auto& q = triangle_rule(kTopOptQuadrature);
    const int nc = mesh_->num_cells();
    std::vector<Triplet> tr;
    tr.reserve(36 * static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {
        const auto& t = mesh_->cells[c];
        const auto g = cell_geometry(*mesh_, c);
        double rint = 0.0; // integral of r(rho~) over the cell
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
            double v = 0.0;
            for (int a = 0; a < 3; ++a) v += q.points[iq][a] * rho_filtered[t[a]];
            rint += 2.0 * q.weights[iq] * g.area * simp(v, problem_.rho_min);
        }
        // B columns: dof 2a -> (gx, 0, gy), dof 2a+1 -> (0, gy, gx)
        double Bm[3][6];
        for (int a = 0; a < 3; ++a) {
            Bm[0][2 * a] = g.grad[a].x;
            Bm[1][2 * a] = 0.0;
            Bm[2][2 * a] = g.grad[a].y;
            Bm[0][2 * a + 1] = 0.0;
            Bm[1][2 * a + 1] = g.grad[a].y;
            Bm[2][2 * a + 1] = g.grad[a].x;
        }
        const double D[3][3] = {{lam + 2.0 * mu, lam, 0.0}, {lam, lam + 2.0 * mu, 0.0}, {0.0, 0.0, mu}};
        for (int i = 0; i < 6; ++i) {
            double DB[3];
            for (int r = 0; r < 3; ++r) DB[r] = D[r][0] * Bm[0][i] + D[r][1] * Bm[1][i] + D[r][2] * Bm[2][i];
            for (int j = 0; j < 6; ++j) {
                const double v = Bm[0][j] * DB[0] + Bm[1][j] * DB[1] + Bm[2][j] * DB[2];
                tr.push_back({2 * t[j / 2] + j % 2, 2 * t[i / 2] + i % 2, rint * v});
            }
        }
    }
    const int n = 2 * mesh_->num_vertices();
    return SparseMatrix::from_triplets(n, n, std::move(tr));
}

Vector Cantilever::elasticity_solve(const Vector& rho_filtered) const {
    Vector rhs = load_;
    const Vector zero(load_.size(), 0.0);
    const SparseMatrix A = apply_dirichlet(elasticity_matrix(rho_filtered), rhs, fixed_, zero);
    try {
        elastic_factor_.factorize(A);
    } catch (const LinearSolveError& e) {
        throw LinearSolveError(std::string("elasticity: singular stiffness (") + e.what() + ")");
    }
    return elastic_factor_.solve(rhs);
}

double Cantilever::compliance(const Vector& u) const { return dot(load_, u); }

Cantilever::Evaluation Cantilever::evaluate(const Vector& rho_cells) const {
    Evaluation ev;
    ev.rho_filtered = helmholtz_filter(rho_cells);
    ev.displacement = elasticity_solve(ev.rho_filtered);
    ev.compliance = compliance(ev.displacement);
    const double lam = problem_.lame_lambda, mu = problem_.lame_mu;
    const auto& q = triangle_rule(kTopOptQuadrature);
    const int nc = mesh_->num_cells();
    Vector g(mesh_->num_vertices(), 0.0);
    for (int c = 0; c < nc; ++c) {
        const auto& t = mesh_->cells[c];
        const auto geo = cell_geometry(*mesh_, c);
        const double sed = strain_energy_density(cell_strain(geo, t, ev.displacement), lam, mu);
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
            double v = 0.0;
            for (int a = 0; a < 3; ++a) v += q.points[iq][a] * ev.rho_filtered[t[a]];
            const double w = -2.0 * q.weights[iq] * geo.area * simp_prime(v, problem_.rho_min) * sed;
            for (int a = 0; a < 3; ++a) g[t[a]] += w * q.points[iq][a];
        }
    }
    ev.w = filter_factor_.solve(g);
    ev.gradient.resize(nc);
    for (int c = 0; c < nc; ++c) {
        const auto& t = mesh_->cells[c];
        ev.gradient[c] = (ev.w[t[0]] + ev.w[t[1]] + ev.w[t[2]]) / 3.0;
    }
    return ev;
}

TopOptResult topopt_solve(const Cantilever& model, StepSchedule& schedule, const TopOptOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& area = model.cell_areas();
    const std::size_t nc = area.size();
    double total = 0.0;
    for (double a : area) total += a;
    const double target = model.problem().theta * total;
    const entropy::EntropyKind kind = entropy::FermiDirac{};

    TopOptResult res;
    res.psi.assign(nc, entropy::lnit(model.problem().theta));
    Vector rho(nc);
    auto to_primal = [&](const Vector& psi, Vector& out) {
        for (std::size_t c = 0; c < nc; ++c) out[c] = entropy::sigmoid(psi[c]);
    };
    to_primal(res.psi, rho);
    for (int k = 1; k <= opts.max_iterations; ++k) {
        const auto ev = model.evaluate(rho);
        const double alpha = schedule.next_alpha();
        for (std::size_t c = 0; c < nc; ++c) res.psi[c] -= alpha * ev.gradient[c];
        const double shift = volume_shift(kind, res.psi, area, target, opts.bisection_tol);
        for (auto& p : res.psi) p += shift;
        Vector rho_new(nc);
        to_primal(res.psi, rho_new);
        double l1 = 0.0, vol = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            l1 += area[c] * std::abs(rho_new[c] - rho[c]);
            vol += area[c] * rho_new[c];
        }
        rho = std::move(rho_new);
        TopOptIteration row;
        row.k = k;
        row.alpha = alpha;
        row.increment_l1 = l1;
        row.eta = l1 / alpha;
        row.compliance = ev.compliance;
        row.volume_error = std::abs(vol - target);
        row.shift = shift;
        res.rows.push_back(row);
        if (opts.on_iterate) opts.on_iterate(row, rho);
        if (l1 <= std::min(alpha * opts.ntol, opts.itol)) {
            res.converged = true;
            break;
        }
    }
    res.rho = rho;
    const auto ev = model.evaluate(rho);
    res.rho_filtered = ev.rho_filtered;
    res.displacement = ev.displacement;
    res.compliance = ev.compliance;
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace lvpp
