#include "fieldcirc/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "fieldcirc/errors.hpp"

namespace fieldcirc {

double Mesh2D::triangle_area(int t) const {
    const auto& tri = triangles[t];
    const auto& a = vertices[tri[0]];
    const auto& b = vertices[tri[1]];
    const auto& c = vertices[tri[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void Mesh2D::validate() const {
    if (region.size() != triangles.size()) {
        throw ModelError("mesh: region tags do not match triangle count");
    }
    for (int t = 0; t < n_triangles(); ++t) {
        for (int k = 0; k < 3; ++k) {
            int v = triangles[t][k];
            if (v < 0 || v >= n_vertices()) throw ModelError("mesh: vertex index out of range");
        }
        if (!(triangle_area(t) > 0.0)) {
            throw ModelError("mesh: degenerate or negatively oriented triangle " +
                             std::to_string(t));
        }
    }
    for (int v : dirichlet) {
        if (v < 0 || v >= n_vertices()) throw ModelError("mesh: Dirichlet index out of range");
    }
    // Edges on exactly one triangle form the boundary; both endpoints must be
    // Dirichlet-tagged.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tri : triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_count[{a, b}]++;
        }
    }
    std::set<int> diri(dirichlet.begin(), dirichlet.end());
    for (const auto& [edge, count] : edge_count) {
        if (count == 1 && (!diri.count(edge.first) || !diri.count(edge.second))) {
            throw ModelError("mesh: boundary edge (" + std::to_string(edge.first) + "," +
                             std::to_string(edge.second) + ") not tagged Dirichlet");
        }
    }
}

Mesh2D structured_unit_square(int nx, const std::function<int(double, double)>& region_of) {
    if (nx < 2) throw ModelError("structured mesh needs at least 2x2 vertices");
    Mesh2D mesh;
    const double h = 1.0 / (nx - 1);
    auto vid = [nx](int i, int j) { return j * nx + i; };
    for (int j = 0; j < nx; ++j) {
        for (int i = 0; i < nx; ++i) {
            mesh.vertices.push_back({i * h, j * h});
        }
    }
    auto push = [&](int a, int b, int c) {
        mesh.triangles.push_back({a, b, c});
        const auto& pa = mesh.vertices[a];
        const auto& pb = mesh.vertices[b];
        const auto& pc = mesh.vertices[c];
        double cx = (pa[0] + pb[0] + pc[0]) / 3.0;
        double cy = (pa[1] + pb[1] + pc[1]) / 3.0;
        mesh.region.push_back(region_of(cx, cy));
    };
    for (int j = 0; j + 1 < nx; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            push(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1));
            push(vid(i, j), vid(i + 1, j + 1), vid(i, j + 1));
        }
    }
    for (int j = 0; j < nx; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (i == 0 || j == 0 || i == nx - 1 || j == nx - 1) {
                mesh.dirichlet.push_back(vid(i, j));
            }
        }
    }
    return mesh;
}

Mesh2D read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open mesh file: " + path);
    Mesh2D mesh;
    int nv = 0;
    if (!(in >> nv) || nv < 0) throw ModelError("mesh file: bad vertex count");
    mesh.vertices.resize(nv);
    for (int i = 0; i < nv; ++i) {
        if (!(in >> mesh.vertices[i][0] >> mesh.vertices[i][1])) {
            throw ModelError("mesh file: bad vertex line");
        }
    }
    int nt = 0;
    if (!(in >> nt) || nt < 0) throw ModelError("mesh file: bad triangle count");
    mesh.triangles.resize(nt);
    mesh.region.resize(nt);
    for (int t = 0; t < nt; ++t) {
        if (!(in >> mesh.triangles[t][0] >> mesh.triangles[t][1] >> mesh.triangles[t][2] >>
              mesh.region[t])) {
            throw ModelError("mesh file: bad triangle line");
        }
    }
    int nd = 0;
    if (!(in >> nd) || nd < 0) throw ModelError("mesh file: bad Dirichlet count");
    mesh.dirichlet.resize(nd);
    for (int i = 0; i < nd; ++i) {
        if (!(in >> mesh.dirichlet[i])) throw ModelError("mesh file: bad Dirichlet line");
    }
    mesh.validate();
    return mesh;
}

void write_mesh(const std::string& path, const Mesh2D& mesh) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write mesh file: " + path);
    char buf[80];
    out << mesh.n_vertices() << "\n";
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v[0], v[1]);
        out << buf;
    }
    out << mesh.n_triangles() << "\n";
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        out << tri[0] << " " << tri[1] << " " << tri[2] << " " << mesh.region[t] << "\n";
    }
    out << mesh.dirichlet.size() << "\n";
    for (int v : mesh.dirichlet) out << v << "\n";
    if (!out) throw ModelError("write failed: " + path);
}

} // namespace fieldcirc
