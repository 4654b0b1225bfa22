#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace fieldcirc {

/// Triangulated 2D domain. Triangles are positively oriented vertex index
/// triples with a region tag; every boundary edge must have both endpoints in
/// the Dirichlet set (gauge A_z = 0 on the outer boundary).
struct Mesh2D {
    std::vector<std::array<double, 2>> vertices; // coordinates in m
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> region;      // per triangle
    std::vector<int> dirichlet;   // vertex indices

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }

    double triangle_area(int t) const;

    /// Throws ModelError on inside-out or degenerate triangles, bad indices,
    /// or untagged boundary edges.
    void validate() const;
};

/// Structured triangulation of the unit square with nx*nx vertices; each cell
/// is split into two positively oriented triangles. Region tags are assigned
/// by the callback from the triangle centroid.
Mesh2D structured_unit_square(int nx, const std::function<int(double, double)>& region_of);

/// Plain-text mesh format: vertex count, `x y` lines, triangle count,
/// `i j k region` lines (0-based), Dirichlet count, one vertex index per line.
Mesh2D read_mesh(const std::string& path);
void write_mesh(const std::string& path, const Mesh2D& mesh);

} // namespace fieldcirc
