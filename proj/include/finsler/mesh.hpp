#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "finsler/geometry.hpp"

namespace finsler::mesh {

enum class NodeClass : std::uint8_t { Outside = 0, Interior = 1, Dirichlet = 2 };

// Structured triangulation of a rectangle or of a planar domain clipped to
// a uniform grid. Each grid cell whose corners are active contributes two
// P1 triangles; boundary-adjacent nodes are projected onto the boundary
// curve (boundary-fitted piecewise-linear rim), and slivers that collapse
// under projection are dropped.
class Mesh2D {
  public:
    struct TriGeom {
        int v[3];
        double area;
        double gx[3], gy[3];  // gradients of the P1 basis functions
    };

    static Mesh2D rectangle(double x0, double y0, double x1, double y1, double h);
    static Mesh2D from_domain(const geom::AnisotropicDistanceField& field, double h);
    // active region { delta_H0 >= margin }; the Dirichlet rim is projected
    // onto the level set along the ray to the nearest boundary point
    static Mesh2D from_domain_shrunk(const geom::AnisotropicDistanceField& field, double h,
                                     double margin);

    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0, h = 0.0;

    std::vector<NodeClass> cls;   // nx*ny
    std::vector<double> px, py;   // node positions (Dirichlet nodes projected)
    std::vector<double> delta;    // delta_H0 per node (domain modes; else -1)
    std::vector<TriGeom> tris;
    std::vector<double> lump;     // per-node patch area / 3

    std::vector<int> unknown_of;  // node -> unknown index, -1 for non-unknowns
    std::vector<int> node_of;     // unknown -> node

    // CSR adjacency: triangles incident to each node, with the local vertex
    std::vector<int> adj_ptr;
    std::vector<int> adj_tri;
    std::vector<int> adj_loc;

    int node(int i, int j) const { return j * nx + i; }
    int n_nodes() const { return nx * ny; }
    int n_unknowns() const { return static_cast<int>(node_of.size()); }
    Eigen::Vector2d pos(int v) const { return {px[v], py[v]}; }
    bool active(int v) const { return cls[v] != NodeClass::Outside; }

    double domain_extent = 0.0;  // max bbox side (diameter proxy)

  private:
    void build_triangles();
    void finalize();
};

// Grid-sampled scalar field on a mesh: values for every node (Dirichlet
// entries hold the boundary data), plus the discrete energy at the solve.
struct DiscreteField {
    std::shared_ptr<const Mesh2D> mesh;
    Eigen::VectorXd values;
    double energy = 0.0;
    bool converged = true;
};

}  // namespace finsler::mesh
