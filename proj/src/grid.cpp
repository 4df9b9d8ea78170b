#include "nlh/grid.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "nlh/errors.hpp"

namespace nlh {

std::string geometry_name(Geometry g) {
    switch (g) {
        case Geometry::OneD: return "1d";
        case Geometry::Cartesian: return "cartesian2d";
        case Geometry::Cylindrical: return "cylindrical";
    }
    return "?";
}

Geometry parse_geometry(const std::string& s) {
    if (s == "1d") return Geometry::OneD;
    if (s == "cartesian2d" || s == "cartesian") return Geometry::Cartesian;
    if (s == "cylindrical") return Geometry::Cylindrical;
    throw Error(ErrorCode::InvalidConfig, "unknown geometry '" + s + "'");
}

Grid1D build_grid_1d(double Zmax, int N) {
    if (!(Zmax > 0.0) || !std::isfinite(Zmax))
        throw Error(ErrorCode::InvalidGrid, "Zmax must be positive");
    if (N < 4) throw Error(ErrorCode::InvalidGrid, "N must be at least 4");
    Grid1D g;
    g.Zmax = Zmax;
    g.N = N;
    g.h = Zmax / N;
    g.delta = 3.0 * g.h;
    return g;
}

double GridND::x(int m) const {
    if (geometry == Geometry::Cylindrical) return (m + 0.5) * hp;
    if (geometry == Geometry::OneD) return 0.0;
    return -Xmax + (m + 0.5) * hp;
}

GridND build_grid_nd(Geometry geom, double Zmax, int N, double Xmax, int M) {
    GridND g;
    g.z = build_grid_1d(Zmax, N);
    g.geometry = geom;
    if (geom == Geometry::OneD) {
        g.M = 1;
        return g;
    }
    if (!(Xmax > 0.0) || !std::isfinite(Xmax))
        throw Error(ErrorCode::InvalidGrid, "transverse extent must be positive");
    if (M < 8) throw Error(ErrorCode::InvalidGrid, "M must be at least 8");
    g.M = M;
    g.Xmax = Xmax;
    g.hp = (geom == Geometry::Cartesian ? 2.0 * Xmax : Xmax) / M;
    double ratio = g.z.h / g.hp;
    if (ratio > 4.0 || ratio < 0.25) {
        g.aspectWarning = true;
        std::cerr << "warning: h_z/h_perp = " << ratio << " outside [1/4, 4]\n";
    }
    return g;
}

GridND as_nd(const Grid1D& g) {
    GridND r;
    r.z = g;
    r.geometry = Geometry::OneD;
    r.M = 1;
    return r;
}

bool MaterialStack::linear() const {
    for (const auto& l : layers)
        if (l.eps != 0.0) return false;
    return true;
}

void validate(const MaterialStack& mat) {
    if (!(mat.k0 > 0.0)) throw Error(ErrorCode::InvalidMaterial, "k0 must be positive");
    if (!(mat.sigma > 0.0)) throw Error(ErrorCode::InvalidMaterial, "sigma must be positive");
    if (mat.layers.empty()) throw Error(ErrorCode::InvalidMaterial, "no layers");
    if (mat.layers.front().z0 != 0.0)
        throw Error(ErrorCode::InvalidMaterial, "first layer must start at z = 0");
    for (size_t i = 0; i < mat.layers.size(); ++i) {
        const auto& l = mat.layers[i];
        if (!(l.z1 > l.z0)) throw Error(ErrorCode::InvalidMaterial, "layer bounds not increasing");
        if (i > 0 && l.z0 != mat.layers[i - 1].z1)
            throw Error(ErrorCode::InvalidMaterial, "layers must be contiguous");
        if (!(l.nu > 0.0) || !std::isfinite(l.nu))
            throw Error(ErrorCode::InvalidMaterial, "nu must be positive");
        if (!std::isfinite(l.eps)) throw Error(ErrorCode::InvalidMaterial, "eps must be finite");
    }
}

MaterialStack homogeneous_slab(double k0, double sigma, double Zmax, double nu, double eps) {
    MaterialStack m;
    m.k0 = k0;
    m.sigma = sigma;
    m.layers.push_back({0.0, Zmax, nu, eps});
    return m;
}

int NodeTable::count(NodeClass c) const {
    int k = 0;
    for (auto x : cls) k += (x == c);
    return k;
}

NodeTable classify_nodes(const Grid1D& grid, const MaterialStack& mat) {
    validate(mat);
    if (std::abs(mat.Zmax() - grid.Zmax) > 1e-12 * grid.h)
        throw Error(ErrorCode::InvalidMaterial, "material stack does not end at Zmax");
    const int N = grid.N;
    std::vector<int> pts{0};
    for (size_t l = 1; l < mat.layers.size(); ++l) {
        double zt = mat.layers[l].z0;
        double r = zt / grid.h;
        long n = std::lround(r);
        if (std::abs(zt - n * grid.h) > 1e-12 * grid.h || n <= 0 || n >= N) {
            std::ostringstream os;
            os.precision(17);
            os << "interface z=" << zt << " is not on a grid node";
            throw Error(ErrorCode::InterfaceOffGrid, os.str());
        }
        pts.push_back(static_cast<int>(n));
    }
    pts.push_back(N);
    for (size_t i = 1; i < pts.size(); ++i)
        if (pts[i] - pts[i - 1] < 3)
            throw Error(ErrorCode::LayerTooThin, "every layer must span at least 3 grid steps");

    NodeTable t;
    t.N = N;
    t.cls.assign(N + 7, NodeClass::Exterior);
    t.layerLeft.assign(N + 7, -1);
    t.layerRight.assign(N + 7, -1);
    for (int n = 0; n <= N; ++n) {
        int l = 0;
        while (l + 1 < static_cast<int>(pts.size()) - 1 && n >= pts[l + 1]) ++l;
        // l is the layer with pts[l] <= n < pts[l+1] (clamped at the last layer)
        bool isPoint = false;
        for (int p : pts) isPoint |= (p == n);
        if (isPoint) {
            t.cls[n + 3] = NodeClass::Interface;
            t.layerRight[n + 3] = (n == N) ? -1 : l;
            t.layerLeft[n + 3] = (n == 0) ? -1 : (n == N ? static_cast<int>(pts.size()) - 2 : l - 1);
        } else {
            t.cls[n + 3] = NodeClass::Interior;
            t.layerLeft[n + 3] = t.layerRight[n + 3] = l;
        }
    }
    t.cls[0] = NodeClass::AbcRow;
    t.cls[N + 6] = NodeClass::AbcRow;
    return t;
}

MaterialSample sample_material(const MaterialStack& mat, const NodeTable& nodes, int n, Side side) {
    if (n < -3 || n > nodes.N + 3) return {};
    int l = side == Side::Left ? nodes.layerLeft[n + 3] : nodes.layerRight[n + 3];
    if (l < 0) return {1.0, 0.0};
    return {mat.layers[l].nu, mat.layers[l].eps};
}

}  // namespace nlh
