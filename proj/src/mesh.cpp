#include "lvpp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "lvpp/error.hpp"

namespace lvpp {

namespace {

double dist(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (hi << 32) | lo;
}

} // namespace

double Mesh::cell_area(int c) const {
    const auto& t = cells[c];
    const Vec2 &p0 = vertices[t[0]], &p1 = vertices[t[1]], &p2 = vertices[t[2]];
    return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

double Mesh::cell_diameter(int c) const {
    const auto& t = cells[c];
    return std::max({dist(vertices[t[0]], vertices[t[1]]), dist(vertices[t[1]], vertices[t[2]]),
                     dist(vertices[t[2]], vertices[t[0]])});
}

Vec2 Mesh::centroid(int c) const {
    const auto& t = cells[c];
    return {(vertices[t[0]].x + vertices[t[1]].x + vertices[t[2]].x) / 3.0,
            (vertices[t[0]].y + vertices[t[1]].y + vertices[t[2]].y) / 3.0};
}

double Mesh::total_area() const {
    double a = 0.0;
    for (int c = 0; c < num_cells(); ++c) a += cell_area(c);
    return a;
}

double Mesh::diameter() const {
    double x0 = std::numeric_limits<double>::max(), y0 = x0, x1 = -x0, y1 = -x0;
    for (const auto& v : vertices) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    return std::hypot(x1 - x0, y1 - y0);
}

std::vector<char> Mesh::boundary_vertex_mask(const std::vector<int>& tags) const {
    std::vector<char> mask(vertices.size(), 0);
    for (const auto& e : boundary_edges) {
        if (!tags.empty() && std::find(tags.begin(), tags.end(), e.tag) == tags.end()) continue;
        mask[e.a] = 1;
        mask[e.b] = 1;
    }
    return mask;
}

double Mesh::min_angle() const {
    double best = std::numbers::pi;
    for (const auto& t : cells) {
        for (int i = 0; i < 3; ++i) {
            const Vec2& p = vertices[t[i]];
            const Vec2& q = vertices[t[(i + 1) % 3]];
            const Vec2& r = vertices[t[(i + 2) % 3]];
            const double ux = q.x - p.x, uy = q.y - p.y, vx = r.x - p.x, vy = r.y - p.y;
            const double ang = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
            best = std::min(best, ang);
        }
    }
    return best;
}

void recompute_h(Mesh& m) {
    m.h = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) m.h = std::max(m.h, m.cell_diameter(c));
}

Mesh rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny) {
    if (nx < 1 || ny < 1) throw ConfigError("rectangle_mesh: need at least one cell per direction");
    Mesh m;
    const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    m.vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            // pin the last node to the exact endpoint
            const double x = i == nx ? x1 : x0 + (x1 - x0) * i / nx;
            const double y = j == ny ? y1 : y0 + (y1 - y0) * j / ny;
            m.vertices.push_back({x, y});
        }
    }
    m.cells.reserve(static_cast<std::size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            m.cells.push_back({a, b, c});
            m.cells.push_back({a, c, d});
        }
    }
    for (int i = 0; i < nx; ++i) m.boundary_edges.push_back({id(i, 0), id(i + 1, 0), tag::kBottom});
    for (int j = 0; j < ny; ++j) m.boundary_edges.push_back({id(nx, j), id(nx, j + 1), tag::kRight});
    for (int i = nx; i > 0; --i) m.boundary_edges.push_back({id(i, ny), id(i - 1, ny), tag::kTop});
    for (int j = ny; j > 0; --j) m.boundary_edges.push_back({id(0, j), id(0, j - 1), tag::kLeft});
    recompute_h(m);
    return m;
}

Mesh unit_square_mesh(int n) {
    if (n < 1) throw ConfigError("unit_square_mesh: n must be >= 1");
    return rectangle_mesh(-1.0, 1.0, -1.0, 1.0, n, n);
}

Mesh refine_uniform(const Mesh& mesh) {
    Mesh out;
    out.circular_boundary = mesh.circular_boundary;
    out.vertices = mesh.vertices;
    std::unordered_map<std::uint64_t, int> mid;
    mid.reserve(mesh.cells.size() * 2);
    auto midpoint = [&](int a, int b) {
        const auto key = edge_key(a, b);
        auto it = mid.find(key);
        if (it != mid.end()) return it->second;
        const Vec2 &p = out.vertices[a], &q = out.vertices[b];
        out.vertices.push_back({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
        const int id = static_cast<int>(out.vertices.size()) - 1;
        mid.emplace(key, id);
        return id;
    };
    out.cells.reserve(mesh.cells.size() * 4);
    for (const auto& t : mesh.cells) {
        const int a = t[0], b = t[1], c = t[2];
        const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
        out.cells.push_back({a, ab, ca});
        out.cells.push_back({ab, b, bc});
        out.cells.push_back({ca, bc, c});
        out.cells.push_back({ab, bc, ca});
    }
    out.boundary_edges.reserve(mesh.boundary_edges.size() * 2);
    for (const auto& e : mesh.boundary_edges) {
        const int m = mid.at(edge_key(e.a, e.b));
        if (mesh.circular_boundary && e.tag == tag::kCircle) {
            Vec2& p = out.vertices[m];
            const double r = std::hypot(p.x, p.y);
            p.x /= r;
            p.y /= r;
        }
        out.boundary_edges.push_back({e.a, m, e.tag});
        out.boundary_edges.push_back({m, e.b, e.tag});
    }
    recompute_h(out);
    return out;
}

Mesh disk_mesh(int level) {
    if (level < 0) throw ConfigError("disk_mesh: level must be >= 0");
    Mesh m;
    m.circular_boundary = true;
    m.vertices.push_back({0.0, 0.0});
    constexpr int kRing = 8;
    for (int k = 0; k < kRing; ++k) {
        const double t = 2.0 * std::numbers::pi * k / kRing;
        m.vertices.push_back({std::cos(t), std::sin(t)});
    }
    for (int k = 0; k < kRing; ++k) {
        const int a = 1 + k, b = 1 + (k + 1) % kRing;
        m.cells.push_back({0, a, b});
        m.boundary_edges.push_back({a, b, tag::kCircle});
    }
    recompute_h(m);
    for (int l = 0; l < level; ++l) m = refine_uniform(m);
    return m;
}

Mesh cantilever_mesh(int nx, int ny) {
    Mesh m = rectangle_mesh(0.0, 3.0, 0.0, 1.0, nx, ny);
    for (auto& e : m.boundary_edges) {
        if (e.tag != tag::kRight) continue;
        const double ymid = 0.5 * (m.vertices[e.a].y + m.vertices[e.b].y);
        if (ymid >= 0.45 && ymid <= 0.55) e.tag = tag::kLoad;
    }
    return m;
}

Mesh strip_mesh(int nx, double hy) {
    if (nx < 1) throw ConfigError("strip_mesh: nx must be >= 1");
    if (hy <= 0.0) hy = 1.0 / nx;
    return rectangle_mesh(0.0, 1.0, 0.0, hy, nx, 1);
}

void validate_mesh(const Mesh& mesh) {
    std::unordered_map<std::uint64_t, int> count;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        if (!(mesh.cell_area(c) > 0.0)) throw DomainError("mesh: cell " + std::to_string(c) + " is not positively oriented");
        const auto& t = mesh.cells[c];
        for (int i = 0; i < 3; ++i) ++count[edge_key(t[i], t[(i + 1) % 3])];
    }
    std::size_t single = 0;
    for (const auto& [k, n] : count) {
        if (n > 2) throw DomainError("mesh: edge shared by more than two cells");
        if (n == 1) ++single;
    }
    for (const auto& e : mesh.boundary_edges) {
        auto it = count.find(edge_key(e.a, e.b));
        if (it == count.end() || it->second != 1) throw DomainError("mesh: boundary edge not owned by exactly one cell");
    }
    if (single != mesh.boundary_edges.size()) throw DomainError("mesh: untagged boundary edges");
}

void write_vtk(const std::string& path, const Mesh& mesh, const VtkFields& fields) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    os << std::setprecision(16);
    os << "# vtk DataFile Version 3.0\nlvpp\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& v : mesh.vertices) os << v.x << ' ' << v.y << " 0\n";
    os << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
    for (const auto& t : mesh.cells) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "CELL_TYPES " << mesh.num_cells() << '\n';
    for (int c = 0; c < mesh.num_cells(); ++c) os << "5\n";
    if (!fields.point_scalars.empty() || !fields.point_vectors.empty()) {
        os << "POINT_DATA " << mesh.num_vertices() << '\n';
        for (const auto& [name, vals] : fields.point_scalars) {
            os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (int i = 0; i < mesh.num_vertices(); ++i) os << vals.at(i) << '\n';
        }
        for (const auto& [name, vals] : fields.point_vectors) {
            os << "VECTORS " << name << " double\n";
            for (int i = 0; i < mesh.num_vertices(); ++i) os << vals.at(i).x << ' ' << vals.at(i).y << " 0\n";
        }
    }
    if (!fields.cell_scalars.empty()) {
        os << "CELL_DATA " << mesh.num_cells() << '\n';
        for (const auto& [name, vals] : fields.cell_scalars) {
            os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (int c = 0; c < mesh.num_cells(); ++c) os << vals.at(c) << '\n';
        }
    }
}

} // namespace lvpp
