#pragma once

#include <complex>

#include <Eigen/Dense>

#include "nlh/field.hpp"
#include "nlh/grid.hpp"

namespace nlh {

enum class TransverseSide { Bottom, Top };

using ClosureBlock = Eigen::Matrix<cd, 2, 3>;

/// Ghost elimination at the transverse edges.
/// top:    (E_M, E_{M+1}) = top * (E_{M-3}, E_{M-2}, E_{M-1})
/// bottom: (E_{-2}, E_{-1}) = bottom * (E_0, E_1, E_2), or the axis symmetry rule.
struct TransverseClosure {
    ClosureBlock top = ClosureBlock::Zero();
    ClosureBlock bottom = ClosureBlock::Zero();
    bool symmetricBottom = false;
    cd alpha = 0.0;
};

cd cartesian_alpha(double nu, double k0);
/// d/drho log H0^(1)(nu k0 rho) at rho = Rmax; rejects nu k0 Rmax < 1.
cd cylindrical_alpha(double nu, double k0, double Rmax);

/// Combines the centred radiation row with quartic extrapolation of the outer ghost.
ClosureBlock radiation_closure(cd alpha, double hp, TransverseSide side);

TransverseClosure make_closure(const GridND& grid, double k0, double nu);

/// Row extended with two ghosts per side; index m maps to m + 2.
Eigen::VectorXcd pad_row(const TransverseClosure& c, const Eigen::Ref<const Eigen::VectorXcd>& row);
Eigen::MatrixXcd extension_matrix(const TransverseClosure& c, int M);

/// Transverse pieces of the semi-compact operators with closures folded in.
/// Cartesian:   Td4 = D4xx, Td2 = D2xx, Tbih = D2xxxx.
/// Cylindrical: Td4 = D4rr + D4r/rho, Td2 = D2rr + D2r/rho,
///              Tbih = D2r/rho^3 - D2rr/rho^2 + 2 D2rrr/rho + D2rrrr.
struct TransverseOps {
    double nu = 1.0;
    TransverseClosure closure;
    Eigen::MatrixXcd Td4, Td2, Tbih;

    /// Td4 - (k0^2 hz^2/12) Td2 - (hz^2/12) Tbih
    Eigen::MatrixXcd lperp(double k0, double hz) const;
};

TransverseOps build_transverse_ops(const GridND& grid, double k0, double nu);

/// Exterior (nu = 1) operator L_perp used by the longitudinal boundary conditions.
Eigen::MatrixXcd build_transverse_operator(const GridND& grid, double k0);

struct TransverseEigensystem {
    Eigen::MatrixXcd Psi;
    Eigen::MatrixXcd PsiInv;
    Eigen::VectorXcd Lambda;  // -(k_perp)^2
    Eigen::VectorXcd q;
    double conditionNumber = 1.0;

    /// Psi diag(q) Psi^-1 and Psi diag((1/q - q)/q^3) Psi^-1
    Eigen::MatrixXcd propagation() const;
    Eigen::MatrixXcd injection() const;
};

TransverseEigensystem eigensolve_transverse(const Eigen::MatrixXcd& L, double k0, double hz);

/// Ghost column at n = -4 (or N+4) from the boundary column n = -3 (or N+3).
Eigen::VectorXcd abc_ghost_row(const TransverseEigensystem& eig, const Eigen::VectorXcd& inc,
                               const Eigen::VectorXcd& boundary);

}  // namespace nlh
