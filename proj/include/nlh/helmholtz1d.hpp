#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlh/field.hpp"
#include "nlh/grid.hpp"

namespace nlh {

struct SolveReport;
struct SolverConfig;

/// Root of q + 1/q = 2 - kh2. Real kh2 in (0, 4): the root with Im q > 0.
/// Otherwise the root with |q| < 1.
cd characteristic_root_kh2(cd kh2);

struct Abc1DClosure {
    cd q;
    cd injection;    // (1/q - q) q^-3
    cd propagation;  // q
};

Abc1DClosure characteristic_root(double k0, double h);

struct Incoming1D {
    cd EincL = 0.0;
    cd EincR = 0.0;
};

/// Residual of the compact scheme on all N+7 nodes, ghosts eliminated.
Eigen::VectorXcd residual_1d(const Grid1D& grid, const MaterialStack& mat, const Incoming1D& inc,
                             const Eigen::VectorXcd& E);

/// Exact linear solution by 2x2 transfer matrices.
struct TransferResult {
    cd R;  // amplitude of exp(-i k0 z) for z <= 0
    cd T;  // amplitude of exp(i k0 (z - Zmax)) for z >= Zmax
    Incoming1D inc;
    double k0 = 0.0;
    double Zmax = 0.0;
    std::vector<Layer> layers;
    std::vector<cd> E0, D0;  // field and derivative at each layer start

    cd field(double z) const;
    cd derivative(double z) const;
};

TransferResult transfer_matrix_linear(const MaterialStack& mat, const Incoming1D& inc);

/// Discrete reflection and transmission read off the exterior nodes.
std::pair<cd, cd> discrete_reflection_transmission(const Grid1D& grid, double k0, const Incoming1D& inc,
                                                   const Eigen::VectorXcd& E);

std::pair<ComplexField2D, SolveReport> solve_1d(const Grid1D& grid, const MaterialStack& mat,
                                                const Incoming1D& inc, const SolverConfig& cfg);

}  // namespace nlh
