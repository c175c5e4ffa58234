#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "lvpp/types.hpp"

namespace lvpp {

namespace tag {
inline constexpr int kLeft = 1;
inline constexpr int kRight = 2;
inline constexpr int kBottom = 3;
inline constexpr int kTop = 4;
inline constexpr int kCircle = 5;
inline constexpr int kLoad = 6;
inline constexpr int kFixed = kLeft;
} // namespace tag

struct BoundaryEdge {
    int a = 0;
    int b = 0;
    int tag = 0;
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> cells; // counterclockwise
    std::vector<BoundaryEdge> boundary_edges;
    double h = 0.0;
    // New boundary midpoints are pushed radially onto the unit circle on refinement.
    bool circular_boundary = false;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }
    double cell_area(int c) const;
    double cell_diameter(int c) const;
    Vec2 centroid(int c) const;
    double total_area() const;
    // Bounding-box diagonal.
    double diameter() const;
    // Vertex mask for boundary edges with any of the given tags (all tags when empty).
    std::vector<char> boundary_vertex_mask(const std::vector<int>& tags = {}) const;
    double min_angle() const;
};

void recompute_h(Mesh& m);

// (-1,1)^2 split into n x n squares, each cut along the lower-left to upper-right diagonal.
Mesh unit_square_mesh(int n);
Mesh rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny);
Mesh refine_uniform(const Mesh& mesh);
// Octagon fan around the origin, refined `level` times with boundary snapping.
Mesh disk_mesh(int level);
// (0,3) x (0,1); left edge tagged kFixed, right-edge edges within y in [0.45, 0.55] tagged kLoad.
Mesh cantilever_mesh(int nx, int ny);
// (0,1) x (0,hy) with nx cells along x and one layer of cells.
Mesh strip_mesh(int nx, double hy = 0.0);

// Cell diameter extremes etc. are checked here; throws on inverted cells or
// boundary edges not belonging to exactly one cell.
void validate_mesh(const Mesh& mesh);

struct VtkFields {
    std::map<std::string, std::vector<double>> point_scalars;
    std::map<std::string, std::vector<Vec2>> point_vectors;
    std::map<std::string, std::vector<double>> cell_scalars;
};

// Legacy ASCII VTK unstructured grid.
void write_vtk(const std::string& path, const Mesh& mesh, const VtkFields& fields);

} // namespace lvpp
