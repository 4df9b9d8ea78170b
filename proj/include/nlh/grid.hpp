#pragma once

#include <string>
#include <utility>
#include <vector>

namespace nlh {

enum class Geometry { OneD, Cartesian, Cylindrical };

std::string geometry_name(Geometry g);
Geometry parse_geometry(const std::string& s);

/// Longitudinal grid z_n = n h, n = -3..N+3.
struct Grid1D {
    double Zmax = 0.0;
    int N = 0;
    double h = 0.0;
    double delta = 0.0;

    double z(int n) const { return n * h; }
    int size() const { return N + 7; }
    int first() const { return -3; }
    int last() const { return N + 3; }
};

Grid1D build_grid_1d(double Zmax, int N);

/// Longitudinal grid plus a cell-centred transverse grid of M cells.
struct GridND {
    Grid1D z;
    Geometry geometry = Geometry::Cartesian;
    int M = 1;
    double Xmax = 0.0;  // Xmax (Cartesian) or Rmax (cylindrical)
    double hp = 0.0;    // transverse step
    bool aspectWarning = false;

    double hz() const { return z.h; }
    int N() const { return z.N; }
    double x(int m) const;
    int nodes() const { return z.size() * M; }
    int index(int n, int m) const { return (n + 3) * M + m; }
};

GridND build_grid_nd(Geometry g, double Zmax, int N, double Xmax, int M);

/// The 1D problem viewed as a transverse grid of a single cell.
GridND as_nd(const Grid1D& g);

struct Layer {
    double z0 = 0.0;
    double z1 = 0.0;
    double nu = 1.0;
    double eps = 0.0;
};

struct MaterialStack {
    double k0 = 1.0;
    double sigma = 1.0;
    std::vector<Layer> layers;

    double Zmax() const { return layers.empty() ? 0.0 : layers.back().z1; }
    bool linear() const;
};

/// Checks the partition and coefficient invariants; throws on violation.
void validate(const MaterialStack& mat);

MaterialStack homogeneous_slab(double k0, double sigma, double Zmax, double nu, double eps);

enum class NodeClass { Exterior, Interior, Interface, AbcRow };

enum class Side { Left, Right };

struct NodeTable {
    int N = 0;
    std::vector<NodeClass> cls;  // indexed n + 3
    std::vector<int> layerLeft;  // layer index on the left of node n, -1 for exterior
    std::vector<int> layerRight;

    NodeClass at(int n) const { return cls[n + 3]; }
    int count(NodeClass c) const;
};

NodeTable classify_nodes(const Grid1D& grid, const MaterialStack& mat);
inline NodeTable classify_nodes(const GridND& grid, const MaterialStack& mat) {
    return classify_nodes(grid.z, mat);
}

struct MaterialSample {
    double nu = 1.0;
    double eps = 0.0;
};

MaterialSample sample_material(const MaterialStack& mat, const NodeTable& nodes, int n, Side side);

}  // namespace nlh
