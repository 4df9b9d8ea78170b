#include "nlh/helmholtz1d.hpp"

#include <cmath>

#include "nlh/errors.hpp"
#include "nlh/helmholtz_nd.hpp"
#include "nlh/solvers.hpp"
#include "nlh/stencils.hpp"

namespace nlh {

cd characteristic_root_kh2(cd kh2) {
    const double mag = std::abs(kh2);
    const bool real = std::abs(kh2.imag()) <= 1e-14 * std::max(1.0, mag);
    if (real) {
        const double x = kh2.real();
        if (x >= 4.0) throw Error(ErrorCode::UnresolvedWave, "k^2 h^2 >= 4");
        if (std::abs(x - 2.0) <= 1e-14) throw Error(ErrorCode::DegenerateRoot, "k^2 h^2 = 2");
        if (x > 0.0) return cd(1.0 - 0.5 * x, std::sqrt(x * (1.0 - 0.25 * x)));
        // evanescent: real roots, keep the decaying one
        const double s = 2.0 - x;
        const double big = 0.5 * (s + std::sqrt(s * s - 4.0));
        return cd(1.0 / big, 0.0);
    }
    const cd s = 2.0 - kh2;
    const cd d = std::sqrt(kh2 * (kh2 - 4.0));
    cd a = 0.5 * (s + d), b = 0.5 * (s - d);
    cd big = std::abs(a) >= std::abs(b) ? a : b;
    cd small = 1.0 / big;
    if (std::abs(std::abs(small) - 1.0) <= 1e-14) return small.imag() > 0.0 ? small : big;
    return small;
}

Abc1DClosure characteristic_root(double k0, double h) {
    if (!(k0 > 0.0) || !(h > 0.0)) throw Error(ErrorCode::InvalidGrid, "k0 and h must be positive");
    const double kh2 = k0 * k0 * h * h / (1.0 + k0 * k0 * h * h / 12.0);
    Abc1DClosure c;
    c.q = characteristic_root_kh2(kh2);
    c.propagation = c.q;
    c.injection = (1.0 / c.q - c.q) / (c.q * c.q * c.q);
    return c;
}

Eigen::VectorXcd residual_1d(const Grid1D& grid, const MaterialStack& mat, const Incoming1D& inc,
                             const Eigen::VectorXcd& E) {
    const NodeTable nodes = classify_nodes(grid, mat);
    const int N = grid.N;
    const double h = grid.h, k0 = mat.k0, k02 = k0 * k0;
    const Abc1DClosure abc = characteristic_root(k0, h);
    if (E.size() != N + 7) throw Error(ErrorCode::InvalidGrid, "field length must be N+7");

    auto e = [&](int n) -> cd {
        if (n == -4) return abc.injection * inc.EincL + abc.q * E[0];
        if (n == N + 4) return abc.injection * inc.EincR + abc.q * E[N + 6];
        return E[n + 3];
    };
    const auto& w7 = interface_7node();
    Eigen::VectorXcd F(N + 7);
    for (int n = -3; n <= N + 3; ++n) {
        const NodeClass c = nodes.at(n);
        cd r;
        if (c == NodeClass::Exterior || c == NodeClass::AbcRow) {
            r = (1.0 + k02 * h * h / 12.0) * (e(n + 1) - 2.0 * e(n) + e(n - 1)) / (h * h) + k02 * e(n);
        } else if (c == NodeClass::Interior) {
            MaterialSample s = sample_material(mat, nodes, n, Side::Right);
            auto f = [&](int k) { return s.nu * s.nu * e(k) + s.eps * kerr(e(k), mat.sigma); };
            r = (e(n + 1) - 2.0 * e(n) + e(n - 1)) / (h * h) +
                k02 * (f(n) + (f(n + 1) - 2.0 * f(n) + f(n - 1)) / 12.0);
        } else {
            MaterialSample l = sample_material(mat, nodes, n, Side::Left);
            MaterialSample rr = sample_material(mat, nodes, n, Side::Right);
            cd d = 0.0;
            for (size_t j = 0; j < w7.offsets.size(); ++j) d += w7.weights[j] * e(n + w7.offsets[j]);
            const double nu2 = 0.5 * (l.nu * l.nu + rr.nu * rr.nu), eps = 0.5 * (l.eps + rr.eps);
            r = d / h + 6.0 * h * k02 / 11.0 * (nu2 * e(n) + eps * kerr(e(n), mat.sigma));
        }
        F[n + 3] = r;
    }
    return F;
}

namespace {

using M2 = Eigen::Matrix2cd;

M2 layer_matrix(double k, double d) {
    M2 m;
    m << std::cos(k * d), std::sin(k * d) / k, -k * std::sin(k * d), std::cos(k * d);
    return m;
}

}  // namespace

TransferResult transfer_matrix_linear(const MaterialStack& mat, const Incoming1D& inc) {
    validate(mat);
    if (!mat.linear()) throw Error(ErrorCode::OracleRequiresLinear, "transfer matrices need eps = 0 in every layer");
    const double k0 = mat.k0;
    const cd ik(0.0, k0);
    M2 tot = M2::Identity();
    for (const auto& l : mat.layers) tot = layer_matrix(l.nu * k0, l.z1 - l.z0) * tot;
    const cd a = tot(0, 0), b = tot(0, 1), c = tot(1, 0), d = tot(1, 1);
    // unknowns (R, T)
    M2 A;
    A << a - ik * b, -1.0, c - ik * d, -ik;
    Eigen::Vector2cd rhs(inc.EincR - (a + ik * b) * inc.EincL, -ik * inc.EincR - (c + ik * d) * inc.EincL);
    Eigen::Vector2cd x = A.partialPivLu().solve(rhs);

    TransferResult r;
    r.R = x[0];
    r.T = x[1];
    r.inc = inc;
    r.k0 = k0;
    r.Zmax = mat.Zmax();
    r.layers = mat.layers;
    Eigen::Vector2cd s(inc.EincL + r.R, ik * (inc.EincL - r.R));
    for (const auto& l : mat.layers) {
        r.E0.push_back(s[0]);
        r.D0.push_back(s[1]);
        s = layer_matrix(l.nu * k0, l.z1 - l.z0) * s;
    }
    return r;
}

cd TransferResult::field(double z) const {
    const cd ik(0.0, k0);
    if (z <= 0.0) return inc.EincL * std::exp(ik * z) + R * std::exp(-ik * z);
    if (z >= Zmax) return T * std::exp(ik * (z - Zmax)) + inc.EincR * std::exp(-ik * (z - Zmax));
    for (size_t i = 0; i < layers.size(); ++i) {
        if (z <= layers[i].z1 || i + 1 == layers.size()) {
            const double k = layers[i].nu * k0, d = z - layers[i].z0;
            return E0[i] * std::cos(k * d) + D0[i] * std::sin(k * d) / k;
        }
    }
    return 0.0;
}

cd TransferResult::derivative(double z) const {
    const cd ik(0.0, k0);
    if (z <= 0.0) return ik * (inc.EincL * std::exp(ik * z) - R * std::exp(-ik * z));
    if (z >= Zmax) return ik * (T * std::exp(ik * (z - Zmax)) - inc.EincR * std::exp(-ik * (z - Zmax)));
    for (size_t i = 0; i < layers.size(); ++i) {
        if (z <= layers[i].z1 || i + 1 == layers.size()) {
            const double k = layers[i].nu * k0, d = z - layers[i].z0;
            return -E0[i] * k * std::sin(k * d) + D0[i] * std::cos(k * d);
        }
    }
    return 0.0;
}

std::pair<cd, cd> discrete_reflection_transmission(const Grid1D& grid, double k0, const Incoming1D& inc,
                                                   const Eigen::VectorXcd& E) {
    const cd q = characteristic_root(k0, grid.h).q;
    const int N = grid.N;
    const cd qm3 = std::pow(q, -3);
    cd R = (E[0] - inc.EincL * qm3) * qm3;
    cd T = (E[N + 6] - inc.EincR * qm3) * qm3;
    return {R, T};
}

std::pair<ComplexField2D, SolveReport> solve_1d(const Grid1D& grid, const MaterialStack& mat,
                                                const Incoming1D& inc, const SolverConfig& cfg) {
    Eigen::VectorXcd l(1), r(1);
    l[0] = inc.EincL;
    r[0] = inc.EincR;
    Problem p = make_problem(as_nd(grid), mat, l, r);
    return solve(p, cfg);
}

}  // namespace nlh
