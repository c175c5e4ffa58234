#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lvpp/linalg.hpp"
#include "lvpp/types.hpp"
#include "lvpp/mesh.hpp"

namespace lvpp {

using Bary = std::array<double, 3>;

struct QuadratureRule {
    std::vector<Bary> points;
    std::vector<double> weights; // sum to 1/2, the reference-cell area
    int degree = 0;
};

// Smallest symmetric rule with exactness >= degree (available: 1, 2, 4, 6).
const QuadratureRule& triangle_rule(int degree);
// Vertices with weight 1/6 each; exact for P1, used for lumping.
const QuadratureRule& vertex_rule();

inline constexpr int kSaddleQuadrature = 4;
inline constexpr int kNonlinearQuadrature = 6;

struct CellGeometry {
    double area = 0.0;
    std::array<Vec2, 3> grad; // gradients of the barycentric coordinates
};

CellGeometry cell_geometry(const Mesh& mesh, int c);
Vec2 map_point(const Mesh& mesh, int c, const Bary& b);

enum class SpaceKind { P1Bubble, P0Broken, P1Nodal };

const char* to_string(SpaceKind k);

class FeSpace {
public:
    FeSpace(const Mesh& mesh, SpaceKind kind);

    const Mesh& mesh() const { return *mesh_; }
    SpaceKind kind() const { return kind_; }
    int ndofs() const { return ndofs_; }
    int local_size() const;
    bool h1_conforming() const { return kind_ != SpaceKind::P0Broken; }
    // Local dofs in the order: three vertices, then the bubble (P1Bubble) or the cell (P0).
    std::array<int, 4> cell_dofs(int c) const;

    // Constrains vertex dofs on boundary edges with the given tags (all when empty) to g.
    void set_dirichlet(const PointFn& g, const std::vector<int>& tags = {});
    void clear_dirichlet();
    const std::vector<char>& dirichlet_mask() const { return dirichlet_; }
    const Vector& dirichlet_values() const { return dirichlet_values_; }
    bool has_dirichlet() const;

private:
    const Mesh* mesh_;
    SpaceKind kind_;
    int ndofs_ = 0;
    std::vector<char> dirichlet_;
    Vector dirichlet_values_;
};

FeSpace build_space(const Mesh& mesh, SpaceKind kind);

// Basis values / gradients of the local dofs at a barycentric point.
int local_values(SpaceKind kind, const Bary& b, std::array<double, 4>& out);
int local_gradients(SpaceKind kind, const CellGeometry& g, const Bary& b, std::array<Vec2, 4>& out);

double evaluate(const FeSpace& space, const Vector& coeffs, int c, const Bary& b);
Vec2 evaluate_gradient(const FeSpace& space, const Vector& coeffs, int c, const Bary& b);

// Vertex values for P1 spaces, centroid correction for the bubble, cell means for P0.
Vector interpolate(const FeSpace& space, const PointFn& f);

// (k grad u, grad v) with a cellwise coefficient (empty = 1). No boundary conditions applied.
SparseMatrix assemble_stiffness(const FeSpace& space, const Vector& cell_coefficient = {});
SparseMatrix assemble_mass(const FeSpace& space, int degree = kNonlinearQuadrature);
// Row sums of the P1 mass matrix (= vertex-rule mass), one entry per vertex.
Vector lumped_mass(const Mesh& mesh);
Vector assemble_load(const FeSpace& space, const PointFn& f, int degree = kNonlinearQuadrature);
// B[i, j] = int phi_j v_i. P1Bubble x P0Broken is exact; P1Nodal x P1Nodal with lumped = true
// uses the vertex rule and is diagonal.
SparseMatrix assemble_coupling(const FeSpace& V, const FeSpace& W, bool lumped = false);

using QuadWeight = std::function<double(int cell, const Bary& b, const Vec2& x)>;
// Diagonal W-block: P0Broken gets int_T weight, P1Nodal (lumped) gets the vertex-rule mass.
SparseMatrix assemble_weighted_mass_W(const FeSpace& W, const QuadWeight& weight);

struct ErrorNorms {
    double L2 = 0.0;
    double H1_semi = 0.0;
    double Linf = 0.0;
};

using GradFn = std::function<Vec2(double, double)>;
// Errors of coeffs against exact; H1_semi is zero when grad is empty.
ErrorNorms compute_error_norms(const FeSpace& space, const Vector& coeffs, const PointFn& exact,
                               const GradFn& grad = {}, int degree = kNonlinearQuadrature);

} // namespace lvpp
