#include "nlh/transverse.hpp"

#include <cmath>

#include "nlh/errors.hpp"
#include "nlh/helmholtz1d.hpp"
#include "nlh/stencils.hpp"

namespace nlh {

cd cartesian_alpha(double nu, double k0) { return cd(0.0, nu * k0); }

cd cylindrical_alpha(double nu, double k0, double Rmax) {
    double x = nu * k0 * Rmax;
    if (!(x >= 1.0))
        throw Error(ErrorCode::SingularClosure, "nu k0 Rmax < 1: far-field radiation condition not applicable");
    cd h0(std::cyl_bessel_j(0.0, x), std::cyl_neumann(0.0, x));
    cd h1(std::cyl_bessel_j(1.0, x), std::cyl_neumann(1.0, x));
    return -nu * k0 * h1 / h0;
}

ClosureBlock radiation_closure(cd alpha, double hp, TransverseSide side) {
    // BC row scaled by 24 h: (1,-27,27,-1) - (3 alpha h / 2)(-1,9,9,-1)
    const cd s = 1.5 * alpha * hp;
    const cd cm2 = 1.0 + s, cm1 = -27.0 - 9.0 * s, c0 = 27.0 - 9.0 * s, c1 = -1.0 + s;
    const cd den = c0 + 4.0 * c1;
    if (std::abs(den) < 1e-14 * (std::abs(c0) + 4.0 * std::abs(c1)) || den == 0.0)
        throw Error(ErrorCode::SingularClosure, "c0 + 4 c1 vanishes");
    ClosureBlock b;
    if (side == TransverseSide::Top) {
        b << -c1, cm2 + 4.0 * c1, cm1 - 6.0 * c1, c0, 4.0 * cm2 - 4.0 * c0, 4.0 * cm1 + 6.0 * c0;
    } else {
        b << 4.0 * cm1 + 6.0 * c0, 4.0 * cm2 - 4.0 * c0, c0, cm1 - 6.0 * c1, cm2 + 4.0 * c1, -c1;
    }
    return -b / den;
}

TransverseClosure make_closure(const GridND& grid, double k0, double nu) {
    TransverseClosure c;
    if (grid.geometry == Geometry::OneD) return c;
    if (grid.geometry == Geometry::Cartesian) {
        c.alpha = cartesian_alpha(nu, k0);
        c.top = radiation_closure(c.alpha, grid.hp, TransverseSide::Top);
        c.bottom = radiation_closure(c.alpha, grid.hp, TransverseSide::Bottom);
    } else {
        c.alpha = cylindrical_alpha(nu, k0, grid.Xmax);
        c.top = radiation_closure(c.alpha, grid.hp, TransverseSide::Top);
        c.symmetricBottom = true;
    }
    return c;
}

Eigen::VectorXcd pad_row(const TransverseClosure& c, const Eigen::Ref<const Eigen::VectorXcd>& row) {
    const Eigen::Index M = row.size();
    Eigen::VectorXcd p(M + 4);
    p.segment(2, M) = row;
    Eigen::Vector3cd hi(row[M - 3], row[M - 2], row[M - 1]);
    Eigen::Vector2cd g = c.top * hi;
    p[M + 2] = g[0];
    p[M + 3] = g[1];
    if (c.symmetricBottom) {
        p[1] = row[0];
        p[0] = row[1];
    } else {
        Eigen::Vector3cd lo(row[0], row[1], row[2]);
        Eigen::Vector2cd gl = c.bottom * lo;
        p[0] = gl[0];
        p[1] = gl[1];
    }
    return p;
}

Eigen::MatrixXcd extension_matrix(const TransverseClosure& c, int M) {
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(M + 4, M);
    for (int m = 0; m < M; ++m) X(m + 2, m) = 1.0;
    for (int j = 0; j < 3; ++j) {
        X(M + 2, M - 3 + j) = c.top(0, j);
        X(M + 3, M - 3 + j) = c.top(1, j);
    }
    if (c.symmetricBottom) {
        X(1, 0) = 1.0;
        X(0, 1) = 1.0;
    } else {
        for (int j = 0; j < 3; ++j) {
            X(0, j) = c.bottom(0, j);
            X(1, j) = c.bottom(1, j);
        }
    }
    return X;
}

namespace {

// M x (M+4) matrix applying a central stencil at every cell, optionally weighted per row.
Eigen::MatrixXd stencil_matrix(int M, const StencilCoeffs& s, double h, const Eigen::VectorXd& rowWeight) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(M, M + 4);
    double sc = std::pow(h, s.scalePower);
    for (int m = 0; m < M; ++m)
        for (size_t j = 0; j < s.offsets.size(); ++j) S(m, m + 2 + s.offsets[j]) += rowWeight[m] * s.weights[j] / sc;
    return S;
}

}  // namespace

TransverseOps build_transverse_ops(const GridND& grid, double k0, double nu) {
    TransverseOps ops;
    ops.nu = nu;
    const int M = grid.M;
    if (grid.geometry == Geometry::OneD) {
        ops.Td4 = ops.Td2 = ops.Tbih = Eigen::MatrixXcd::Zero(1, 1);
        return ops;
    }
    ops.closure = make_closure(grid, k0, nu);
    const double h = grid.hp;
    Eigen::VectorXd one = Eigen::VectorXd::Ones(M);
    Eigen::MatrixXd S4, S2, Sb;
    if (grid.geometry == Geometry::Cartesian) {
        S4 = stencil_matrix(M, central(2, 4), h, one);
        S2 = stencil_matrix(M, central(2, 2), h, one);
        Sb = stencil_matrix(M, central(4, 2), h, one);
    } else {
        Eigen::VectorXd r1(M), r2(M), r3(M);
        for (int m = 0; m < M; ++m) {
            double rho = grid.x(m);
            r1[m] = 1.0 / rho;
            r2[m] = 1.0 / (rho * rho);
            r3[m] = 1.0 / (rho * rho * rho);
        }
        S4 = stencil_matrix(M, central(2, 4), h, one) + stencil_matrix(M, central(1, 4), h, r1);
        S2 = stencil_matrix(M, central(2, 2), h, one) + stencil_matrix(M, central(1, 2), h, r1);
        Sb = stencil_matrix(M, central(1, 2), h, r3) - stencil_matrix(M, central(2, 2), h, r2) +
             2.0 * stencil_matrix(M, central(3, 2), h, r1) + stencil_matrix(M, central(4, 2), h, one);
    }
    Eigen::MatrixXcd X = extension_matrix(ops.closure, M);
    ops.Td4 = S4.cast<cd>() * X;
    ops.Td2 = S2.cast<cd>() * X;
    ops.Tbih = Sb.cast<cd>() * X;
    return ops;
}

Eigen::MatrixXcd TransverseOps::lperp(double k0, double hz) const {
    const double c = hz * hz / 12.0;
    return Td4 - (k0 * k0 * c) * Td2 - c * Tbih;
}

Eigen::MatrixXcd build_transverse_operator(const GridND& grid, double k0) {
    return build_transverse_ops(grid, k0, 1.0).lperp(k0, grid.hz());
}

Eigen::MatrixXcd TransverseEigensystem::propagation() const {
    return Psi * q.asDiagonal() * PsiInv;
}

Eigen::MatrixXcd TransverseEigensystem::injection() const {
    Eigen::VectorXcd g(q.size());
    for (Eigen::Index l = 0; l < q.size(); ++l) g[l] = (1.0 / q[l] - q[l]) / (q[l] * q[l] * q[l]);
    return Psi * g.asDiagonal() * PsiInv;
}

TransverseEigensystem eigensolve_transverse(const Eigen::MatrixXcd& L, double k0, double hz) {
    TransverseEigensystem e;
    const Eigen::Index M = L.rows();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L, true);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::IllConditionedEigenbasis, "eigensolver failed");
    e.Lambda = es.eigenvalues();
    e.Psi = es.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e.Psi);
    const auto& sv = svd.singularValues();
    e.conditionNumber = sv[M - 1] > 0.0 ? sv[0] / sv[M - 1] : INFINITY;
    if (!(e.conditionNumber <= 1e12))
        throw Error(ErrorCode::IllConditionedEigenbasis, "cond(Psi) exceeds 1e12");
    e.PsiInv = e.Psi.partialPivLu().inverse();
    e.q.resize(M);
    const double scale = hz * hz / (1.0 + k0 * k0 * hz * hz / 12.0);
    for (Eigen::Index l = 0; l < M; ++l) e.q[l] = characteristic_root_kh2((k0 * k0 + e.Lambda[l]) * scale);
    return e;
}

Eigen::VectorXcd abc_ghost_row(const TransverseEigensystem& eig, const Eigen::VectorXcd& inc,
                               const Eigen::VectorXcd& boundary) {
    Eigen::VectorXcd ui = eig.PsiInv * inc;
    Eigen::VectorXcd ub = eig.PsiInv * boundary;
    Eigen::VectorXcd u(ui.size());
    for (Eigen::Index l = 0; l < u.size(); ++l) {
        cd q = eig.q[l];
        u[l] = (1.0 / q - q) / (q * q * q) * ui[l] + q * ub[l];
    }
    return eig.Psi * u;
}

}  // namespace nlh
