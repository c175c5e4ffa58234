#include "lvpp/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lvpp/error.hpp"

namespace lvpp {

namespace {

QuadratureRule make_rule(int degree, const std::vector<std::pair<std::vector<double>, double>>& orbits) {
    // orbits: ({a}, w) -> centroid when a.size()==0 handled by caller,
    // ({a}, w) -> (a, a, 1-2a) and permutations, ({a, b}, w) -> six permutations of (a, b, 1-a-b)
    QuadratureRule r;
    r.degree = degree;
    for (const auto& [params, w] : orbits) {
        if (params.empty()) {
            r.points.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
            r.weights.push_back(0.5 * w);
        } else if (params.size() == 1) {
            const double a = params[0], c = 1.0 - 2.0 * a;
            for (const Bary& p : {Bary{a, a, c}, Bary{a, c, a}, Bary{c, a, a}}) {
                r.points.push_back(p);
                r.weights.push_back(0.5 * w);
            }
        } else {
            const double a = params[0], b = params[1], c = 1.0 - a - b;
            for (const Bary& p : {Bary{a, b, c}, Bary{a, c, b}, Bary{b, a, c}, Bary{b, c, a}, Bary{c, a, b}, Bary{c, b, a}}) {
                r.points.push_back(p);
                r.weights.push_back(0.5 * w);
            }
        }
    }
    return r;
}

} // namespace

const QuadratureRule& triangle_rule(int degree) {
    static const QuadratureRule d1 = make_rule(1, {{{}, 1.0}});
    static const QuadratureRule d2 = make_rule(2, {{{1.0 / 6.0}, 1.0 / 3.0}});
    // Dunavant rules
    static const QuadratureRule d4 = make_rule(4, {{{0.445948490915965}, 0.223381589678011},
                                                   {{0.091576213509771}, 0.109951743655322}});
    static const QuadratureRule d6 = make_rule(6, {{{0.249286745170910}, 0.116786275726379},
                                                   {{0.063089014491502}, 0.050844906370207},
                                                   {{0.053145049844817, 0.310352451033784}, 0.082851075618374}});
    if (degree <= 1) return d1;
    if (degree <= 2) return d2;
    if (degree <= 4) return d4;
    if (degree <= 6) return d6;
    throw ConfigError("triangle_rule: no rule of degree " + std::to_string(degree));
}

const QuadratureRule& vertex_rule() {
    static const QuadratureRule r{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {1.0 / 6, 1.0 / 6, 1.0 / 6}, 1};
    return r;
}

CellGeometry cell_geometry(const Mesh& mesh, int c) {
    const auto& t = mesh.cells[c];
    const Vec2 &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    CellGeometry g;
    g.area = 0.5 * det;
    g.grad[0] = {(p1.y - p2.y) / det, (p2.x - p1.x) / det};
    g.grad[1] = {(p2.y - p0.y) / det, (p0.x - p2.x) / det};
    g.grad[2] = {(p0.y - p1.y) / det, (p1.x - p0.x) / det};
    return g;
}

Vec2 map_point(const Mesh& mesh, int c, const Bary& b) {
    const auto& t = mesh.cells[c];
    Vec2 x;
    for (int i = 0; i < 3; ++i) {
        x.x += b[i] * mesh.vertices[t[i]].x;
        x.y += b[i] * mesh.vertices[t[i]].y;
    }
    return x;
}

const char* to_string(SpaceKind k) {
    switch (k) {
    case SpaceKind::P1Bubble: return "P1-bubble";
    case SpaceKind::P0Broken: return "P0-broken";
    case SpaceKind::P1Nodal: return "P1";
    }
    return "?";
}

FeSpace::FeSpace(const Mesh& mesh, SpaceKind kind) : mesh_(&mesh), kind_(kind) {
    switch (kind) {
    case SpaceKind::P1Bubble: ndofs_ = mesh.num_vertices() + mesh.num_cells(); break;
    case SpaceKind::P0Broken: ndofs_ = mesh.num_cells(); break;
    case SpaceKind::P1Nodal: ndofs_ = mesh.num_vertices(); break;
    }
    dirichlet_.assign(ndofs_, 0);
    dirichlet_values_.assign(ndofs_, 0.0);
}

int FeSpace::local_size() const {
    switch (kind_) {
    case SpaceKind::P1Bubble: return 4;
    case SpaceKind::P0Broken: return 1;
    case SpaceKind::P1Nodal: return 3;
    }
    return 0;
}

std::array<int, 4> FeSpace::cell_dofs(int c) const {
    const auto& t = mesh_->cells[c];
    switch (kind_) {
    case SpaceKind::P1Bubble: return {t[0], t[1], t[2], mesh_->num_vertices() + c};
    case SpaceKind::P0Broken: return {c, -1, -1, -1};
    case SpaceKind::P1Nodal: return {t[0], t[1], t[2], -1};
    }
    return {};
}

void FeSpace::set_dirichlet(const PointFn& g, const std::vector<int>& tags) {
    if (!h1_conforming()) throw ConfigError("set_dirichlet: P0 space has no boundary dofs");
    const auto mask = mesh_->boundary_vertex_mask(tags);
    for (int v = 0; v < mesh_->num_vertices(); ++v) {
        if (!mask[v]) continue;
        dirichlet_[v] = 1;
        dirichlet_values_[v] = g ? g(mesh_->vertices[v].x, mesh_->vertices[v].y) : 0.0;
    }
}

void FeSpace::clear_dirichlet() {
    std::fill(dirichlet_.begin(), dirichlet_.end(), 0);
    std::fill(dirichlet_values_.begin(), dirichlet_values_.end(), 0.0);
}

bool FeSpace::has_dirichlet() const {
    return std::any_of(dirichlet_.begin(), dirichlet_.end(), [](char c) { return c != 0; });
}

FeSpace build_space(const Mesh& mesh, SpaceKind kind) { return FeSpace(mesh, kind); }

int local_values(SpaceKind kind, const Bary& b, std::array<double, 4>& out) {
    switch (kind) {
    case SpaceKind::P1Bubble:
        out = {b[0], b[1], b[2], 27.0 * b[0] * b[1] * b[2]};
        return 4;
    case SpaceKind::P0Broken:
        out[0] = 1.0;
        return 1;
    case SpaceKind::P1Nodal:
        out = {b[0], b[1], b[2], 0.0};
        return 3;
    }
    return 0;
}

int local_gradients(SpaceKind kind, const CellGeometry& g, const Bary& b, std::array<Vec2, 4>& out) {
    switch (kind) {
    case SpaceKind::P1Bubble: {
        out[0] = g.grad[0];
        out[1] = g.grad[1];
        out[2] = g.grad[2];
        const double c0 = 27.0 * b[1] * b[2], c1 = 27.0 * b[0] * b[2], c2 = 27.0 * b[0] * b[1];
        out[3] = {c0 * g.grad[0].x + c1 * g.grad[1].x + c2 * g.grad[2].x,
                  c0 * g.grad[0].y + c1 * g.grad[1].y + c2 * g.grad[2].y};
        return 4;
    }
    case SpaceKind::P0Broken:
        out[0] = {0.0, 0.0};
        return 1;
    case SpaceKind::P1Nodal:
        out[0] = g.grad[0];
        out[1] = g.grad[1];
        out[2] = g.grad[2];
        return 3;
    }
    return 0;
}

double evaluate(const FeSpace& space, const Vector& coeffs, int c, const Bary& b) {
    std::array<double, 4> phi{};
    const int n = local_values(space.kind(), b, phi);
    const auto dofs = space.cell_dofs(c);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += coeffs[dofs[i]] * phi[i];
    return s;
}

Vec2 evaluate_gradient(const FeSpace& space, const Vector& coeffs, int c, const Bary& b) {
    std::array<Vec2, 4> dphi{};
    const auto g = cell_geometry(space.mesh(), c);
    const int n = local_gradients(space.kind(), g, b, dphi);
    const auto dofs = space.cell_dofs(c);
    Vec2 s;
    for (int i = 0; i < n; ++i) {
        s.x += coeffs[dofs[i]] * dphi[i].x;
        s.y += coeffs[dofs[i]] * dphi[i].y;
    }
    return s;
}

Vector interpolate(const FeSpace& space, const PointFn& f) {
    const Mesh& m = space.mesh();
    Vector out(space.ndofs(), 0.0);
    if (space.kind() == SpaceKind::P0Broken) {
        const auto& q = triangle_rule(kNonlinearQuadrature);
        for (int c = 0; c < m.num_cells(); ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < q.points.size(); ++k) {
                const Vec2 x = map_point(m, c, q.points[k]);
                s += 2.0 * q.weights[k] * f(x.x, x.y);
            }
            out[c] = s;
        }
        return out;
    }
    for (int v = 0; v < m.num_vertices(); ++v) out[v] = f(m.vertices[v].x, m.vertices[v].y);
    if (space.kind() == SpaceKind::P1Bubble) {
        for (int c = 0; c < m.num_cells(); ++c) {
            const auto& t = m.cells[c];
            const Vec2 x = m.centroid(c);
            out[m.num_vertices() + c] = f(x.x, x.y) - (out[t[0]] + out[t[1]] + out[t[2]]) / 3.0;
        }
    }
    return out;
}

SparseMatrix assemble_stiffness(const FeSpace& space, const Vector& cell_coefficient) {
    if (!space.h1_conforming()) throw ConfigError("assemble_stiffness: space is not H1-conforming");
    const Mesh& m = space.mesh();
    const int n = space.local_size();
    const auto& q = triangle_rule(kSaddleQuadrature);
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(m.num_cells()) * n * n);
    std::array<Vec2, 4> dphi{};
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto g = cell_geometry(m, c);
        const double k = cell_coefficient.empty() ? 1.0 : cell_coefficient[c];
        const auto dofs = space.cell_dofs(c);
        double local[4][4] = {};
        const bool p1 = space.kind() == SpaceKind::P1Nodal;
        const auto& rule = p1 ? triangle_rule(1) : q;
        for (std::size_t iq = 0; iq < rule.points.size(); ++iq) {
            local_gradients(space.kind(), g, rule.points[iq], dphi);
            const double w = 2.0 * rule.weights[iq] * g.area * k;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) local[i][j] += w * (dphi[i].x * dphi[j].x + dphi[i].y * dphi[j].y);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) t.push_back({dofs[i], dofs[j], local[i][j]});
    }
    return SparseMatrix::from_triplets(space.ndofs(), space.ndofs(), std::move(t));
}

SparseMatrix assemble_mass(const FeSpace& space, int degree) {
    const Mesh& m = space.mesh();
    const int n = space.local_size();
    const auto& q = triangle_rule(degree);
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(m.num_cells()) * n * n);
    std::array<double, 4> phi{};
    for (int c = 0; c < m.num_cells(); ++c) {
        const double area = m.cell_area(c);
        const auto dofs = space.cell_dofs(c);
        double local[4][4] = {};
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
            local_values(space.kind(), q.points[iq], phi);
            const double w = 2.0 * q.weights[iq] * area;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) local[i][j] += w * phi[i] * phi[j];
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) t.push_back({dofs[i], dofs[j], local[i][j]});
    }
    return SparseMatrix::from_triplets(space.ndofs(), space.ndofs(), std::move(t));
}

Vector lumped_mass(const Mesh& mesh) {
    Vector mass(mesh.num_vertices(), 0.0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double a = mesh.cell_area(c) / 3.0;
        for (int v : mesh.cells[c]) mass[v] += a;
    }
    return mass;
}

Vector assemble_load(const FeSpace& space, const PointFn& f, int degree) {
    const Mesh& m = space.mesh();
    const auto& q = triangle_rule(degree);
    Vector b(space.ndofs(), 0.0);
    std::array<double, 4> phi{};
    for (int c = 0; c < m.num_cells(); ++c) {
        const double area = m.cell_area(c);
        const auto dofs = space.cell_dofs(c);
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
            const int n = local_values(space.kind(), q.points[iq], phi);
            const Vec2 x = map_point(m, c, q.points[iq]);
            const double w = 2.0 * q.weights[iq] * area * f(x.x, x.y);
            for (int i = 0; i < n; ++i) b[dofs[i]] += w * phi[i];
        }
    }
    return b;
}

SparseMatrix assemble_coupling(const FeSpace& V, const FeSpace& W, bool lumped) {
    if (&V.mesh() != &W.mesh()) throw ConfigError("assemble_coupling: spaces live on different meshes");
    const Mesh& m = V.mesh();
    std::vector<Triplet> t;
    if (lumped) {
        if (V.kind() != SpaceKind::P1Nodal || W.kind() != SpaceKind::P1Nodal)
            throw ConfigError("assemble_coupling: lumping needs the (P1, P1) pair");
        const Vector mass = lumped_mass(m);
        for (int v = 0; v < m.num_vertices(); ++v) t.push_back({v, v, mass[v]});
        return SparseMatrix::from_triplets(V.ndofs(), W.ndofs(), std::move(t));
    }
    const auto& q = triangle_rule(kSaddleQuadrature);
    const int nv = V.local_size(), nw = W.local_size();
    std::array<double, 4> pv{}, pw{};
    for (int c = 0; c < m.num_cells(); ++c) {
        const double area = m.cell_area(c);
        const auto dv = V.cell_dofs(c);
        const auto dw = W.cell_dofs(c);
        double local[4][4] = {};
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
            local_values(V.kind(), q.points[iq], pv);
            local_values(W.kind(), q.points[iq], pw);
            const double w = 2.0 * q.weights[iq] * area;
            for (int i = 0; i < nv; ++i)
                for (int j = 0; j < nw; ++j) local[i][j] += w * pv[i] * pw[j];
        }
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nw; ++j) t.push_back({dv[i], dw[j], local[i][j]});
    }
    return SparseMatrix::from_triplets(V.ndofs(), W.ndofs(), std::move(t));
}

SparseMatrix assemble_weighted_mass_W(const FeSpace& W, const QuadWeight& weight) {
    const Mesh& m = W.mesh();
    Vector d(W.ndofs(), 0.0);
    if (W.kind() == SpaceKind::P0Broken) {
        const auto& q = triangle_rule(kNonlinearQuadrature);
        for (int c = 0; c < m.num_cells(); ++c) {
            const double area = m.cell_area(c);
            double s = 0.0;
            for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
                const double w = weight(c, q.points[iq], map_point(m, c, q.points[iq]));
                if (!(w > 0.0)) throw DomainError("assemble_weighted_mass_W: nonpositive weight");
                s += 2.0 * q.weights[iq] * area * w;
            }
            d[c] = s;
        }
    } else if (W.kind() == SpaceKind::P1Nodal) {
        for (int c = 0; c < m.num_cells(); ++c) {
            const double a = m.cell_area(c) / 3.0;
            for (int i = 0; i < 3; ++i) {
                Bary b{0, 0, 0};
                b[i] = 1.0;
                const double w = weight(c, b, m.vertices[m.cells[c][i]]);
                if (!(w > 0.0)) throw DomainError("assemble_weighted_mass_W: nonpositive weight");
                d[m.cells[c][i]] += a * w;
            }
        }
    } else {
        throw ConfigError("assemble_weighted_mass_W: latent space must be P0Broken or P1Nodal");
    }
    return SparseMatrix::diagonal(d);
}

ErrorNorms compute_error_norms(const FeSpace& space, const Vector& coeffs, const PointFn& exact,
                               const GradFn& grad, int degree) {
    const Mesh& m = space.mesh();
    const auto& q = triangle_rule(degree);
    ErrorNorms e;
    double l2 = 0.0, h1 = 0.0;
    auto sample = [&](int c, const Bary& b) {
        const Vec2 x = map_point(m, c, b);
        return std::abs(exact(x.x, x.y) - evaluate(space, coeffs, c, b));
    };
    for (int c = 0; c < m.num_cells(); ++c) {
        const double area = m.cell_area(c);
        for (std::size_t iq = 0; iq < q.points.size(); ++iq) {
            const Bary& b = q.points[iq];
            const double w = 2.0 * q.weights[iq] * area;
            const double d = sample(c, b);
            l2 += w * d * d;
            e.Linf = std::max(e.Linf, d);
            if (grad) {
                const Vec2 x = map_point(m, c, b);
                const Vec2 ge = grad(x.x, x.y);
                const Vec2 gh = evaluate_gradient(space, coeffs, c, b);
                h1 += w * ((ge.x - gh.x) * (ge.x - gh.x) + (ge.y - gh.y) * (ge.y - gh.y));
            }
        }
        for (int i = 0; i < 3; ++i) {
            Bary b{0, 0, 0};
            b[i] = 1.0;
            e.Linf = std::max(e.Linf, sample(c, b));
        }
    }
    e.L2 = std::sqrt(l2);
    e.H1_semi = std::sqrt(h1);
    return e;
}

} // namespace lvpp
