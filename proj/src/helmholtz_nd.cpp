#include "nlh/helmholtz_nd.hpp"

#include <algorithm>
#include <cmath>

#include "nlh/errors.hpp"
#include "nlh/helmholtz1d.hpp"
#include "nlh/stencils.hpp"

namespace nlh {

namespace {

struct Bulk {
    double nu, eps;
};

Bulk bulk_material(const Problem& p, int n) {
    if (p.nodes.at(n) == NodeClass::Interior) {
        MaterialSample s = sample_material(p.mat, p.nodes, n, Side::Right);
        return {s.nu, s.eps};
    }
    return {1.0, 0.0};
}

struct InterfaceMaterial {
    double nu2, eps;
};

InterfaceMaterial interface_material(const Problem& p, int n) {
    MaterialSample l = sample_material(p.mat, p.nodes, n, Side::Left);
    MaterialSample r = sample_material(p.mat, p.nodes, n, Side::Right);
    return {0.5 * (l.nu * l.nu + r.nu * r.nu), 0.5 * (l.eps + r.eps)};
}

void add_ops(std::vector<TransverseOps>& ops, const GridND& g, double k0, double nu) {
    for (const auto& o : ops)
        if (o.nu == nu) return;
    ops.push_back(build_transverse_ops(g, k0, nu));
}

}  // namespace

const TransverseOps& Problem::opsFor(double nu) const {
    for (const auto& o : ops)
        if (o.nu == nu) return o;
    throw Error(ErrorCode::InvalidMaterial, "no transverse operators cached for this nu");
}

namespace {

void assemble_form(Problem& p) {
    const GridND& g = p.grid;
    const int N = g.N(), M = g.M;
    const double h = g.hz(), k02 = p.mat.k0 * p.mat.k0;
    const int n_unk = g.nodes();
    std::vector<Eigen::Triplet<cd>> te, tp;
    te.reserve(static_cast<size_t>(n_unk) * 12);
    tp.reserve(static_cast<size_t>(n_unk) * 8);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n_unk);
    const Eigen::VectorXcd gL = p.G * p.incL, gR = p.G * p.incR;

    auto idx = [&](int n, int m) { return g.index(n, m); };
    auto addRow = [](std::vector<Eigen::Triplet<cd>>& t, int row, int M_, int base, const Eigen::MatrixXcd& T,
                     int m, cd scale) {
        if (scale == 0.0) return;
        for (int mp = 0; mp < M_; ++mp) {
            cd v = T(m, mp);
            if (v != 0.0) t.emplace_back(row, base + mp, scale * v);
        }
    };

    const auto& w7 = interface_7node();
    for (int n = -3; n <= N + 3; ++n) {
        const NodeClass c = p.nodes.at(n);
        const int base = idx(n, 0);
        if (c == NodeClass::Interface) {
            InterfaceMaterial im = interface_material(p, n);
            const TransverseOps& o = p.opsFor(std::sqrt(im.nu2));
            for (int m = 0; m < M; ++m) {
                const int row = base + m;
                for (size_t j = 0; j < w7.offsets.size(); ++j)
                    te.emplace_back(row, idx(n + w7.offsets[j], m), w7.weights[j] / h);
                te.emplace_back(row, row, 6.0 * h * k02 / 11.0 * im.nu2);
                if (im.eps != 0.0) tp.emplace_back(row, row, 6.0 * h * k02 / 11.0 * im.eps);
                addRow(te, row, M, base, o.Td4, m, 6.0 * h / 11.0);
            }
            continue;
        }
        const Bulk mt = bulk_material(p, n);
        const TransverseOps& o = p.opsFor(mt.nu);
        const double nu2 = mt.nu * mt.nu;
        const cd side = 1.0 / (h * h) + k02 * nu2 / 12.0;
        const Eigen::MatrixXcd TE = o.Td4 - (h * h / 12.0) * o.Tbih - (k02 * nu2 * h * h / 12.0) * o.Td2;
        for (int m = 0; m < M; ++m) {
            const int row = base + m;
            te.emplace_back(row, row, -2.0 / (h * h) + k02 * nu2 * 10.0 / 12.0);
            if (mt.eps != 0.0) {
                tp.emplace_back(row, row, k02 * mt.eps * 10.0 / 12.0);
                addRow(tp, row, M, base, o.Td2, m, -k02 * mt.eps * h * h / 12.0);
            }
            addRow(te, row, M, base, TE, m, 1.0);
            for (int dn : {-1, 1}) {
                const int nn = n + dn;
                if (nn == -4 || nn == N + 4) {
                    // ghost column eliminated through the two-way boundary relation
                    addRow(te, row, M, base, p.Q, m, side);
                    b[row] -= side * (nn == -4 ? gL[m] : gR[m]);
                } else {
                    te.emplace_back(row, idx(nn, m), side);
                    if (mt.eps != 0.0) tp.emplace_back(row, idx(nn, m), k02 * mt.eps / 12.0);
                }
            }
        }
    }
    p.form.AE.resize(n_unk, n_unk);
    p.form.AE.setFromTriplets(te.begin(), te.end());
    p.form.AP.resize(n_unk, n_unk);
    p.form.AP.setFromTriplets(tp.begin(), tp.end());
    p.form.AE.makeCompressed();
    p.form.AP.makeCompressed();
    p.form.b = b;
    p.form.sigma = p.mat.sigma;
}

}  // namespace

Problem make_problem(const GridND& grid, const MaterialStack& mat, const Eigen::VectorXcd& incL,
                     const Eigen::VectorXcd& incR) {
    Problem p;
    p.grid = grid;
    p.mat = mat;
    p.nodes = classify_nodes(grid, mat);
    if (incL.size() != grid.M || incR.size() != grid.M)
        throw Error(ErrorCode::InvalidConfig, "incoming profiles must have M entries");
    p.incL = incL;
    p.incR = incR;
    const double k0 = mat.k0, h = grid.hz();

    add_ops(p.ops, grid, k0, 1.0);
    for (const auto& l : mat.layers) add_ops(p.ops, grid, k0, l.nu);
    for (int n = 0; n <= grid.N(); ++n)
        if (p.nodes.at(n) == NodeClass::Interface) add_ops(p.ops, grid, k0, std::sqrt(interface_material(p, n).nu2));

    if (grid.geometry == Geometry::OneD) {
        p.eig.Psi = p.eig.PsiInv = Eigen::MatrixXcd::Identity(1, 1);
        p.eig.Lambda = Eigen::VectorXcd::Zero(1);
        p.eig.q = Eigen::VectorXcd::Constant(1, characteristic_root(k0, h).q);
        p.eig.conditionNumber = 1.0;
    } else {
        p.eig = eigensolve_transverse(p.opsFor(1.0).lperp(k0, h), k0, h);
    }
    p.Q = p.eig.propagation();
    p.G = p.eig.injection();
    assemble_form(p);
    return p;
}

Eigen::VectorXcd ghost_left(const Problem& p, const ComplexField2D& E) {
    Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(&E(-3, 0), p.grid.M);
    return abc_ghost_row(p.eig, p.incL, b);
}

Eigen::VectorXcd ghost_right(const Problem& p, const ComplexField2D& E) {
    const int N = p.grid.N();
    Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(&E(N + 3, 0), p.grid.M);
    return abc_ghost_row(p.eig, p.incR, b);
}

namespace {

struct TransverseParts {
    cd d4 = 0.0, d2 = 0.0, bih = 0.0;
};

TransverseParts transverse_parts(const GridND& g, const TransverseClosure& c, const Eigen::VectorXcd& row, int m) {
    TransverseParts t;
    if (g.geometry == Geometry::OneD) return t;
    Eigen::VectorXcd pr = pad_row(c, row);
    std::span<const cd> f(pr.data(), static_cast<size_t>(pr.size()));
    const int i = m + 2;
    const double h = g.hp;
    if (g.geometry == Geometry::Cartesian) {
        t.d4 = apply_stencil(f, central(2, 4), i, h);
        t.d2 = apply_stencil(f, central(2, 2), i, h);
        t.bih = apply_stencil(f, central(4, 2), i, h);
    } else {
        const double rho = g.x(m);
        t.d4 = apply_stencil(f, central(2, 4), i, h) + apply_stencil(f, central(1, 4), i, h) / rho;
        t.d2 = apply_stencil(f, central(2, 2), i, h) + apply_stencil(f, central(1, 2), i, h) / rho;
        t.bih = apply_stencil(f, central(1, 2), i, h) / (rho * rho * rho) -
                apply_stencil(f, central(2, 2), i, h) / (rho * rho) +
                2.0 * apply_stencil(f, central(3, 2), i, h) / rho + apply_stencil(f, central(4, 2), i, h);
    }
    return t;
}

Eigen::VectorXcd column(const Problem& p, const ComplexField2D& E, int n) {
    if (n == -4) return ghost_left(p, E);
    if (n == p.grid.N() + 4) return ghost_right(p, E);
    return Eigen::Map<const Eigen::VectorXcd>(&E(n, 0), p.grid.M);
}

cd bulk_row(const Problem& p, const ComplexField2D& E, int n, int m, Bulk mt) {
    const double h = p.grid.hz(), k02 = p.mat.k0 * p.mat.k0, s = p.mat.sigma;
    const TransverseOps& o = p.opsFor(mt.nu);
    const Eigen::VectorXcd em = column(p, E, n - 1), e0 = column(p, E, n), ep = column(p, E, n + 1);
    auto f = [&](const Eigen::VectorXcd& e) {
        Eigen::VectorXcd r(e.size());
        for (Eigen::Index i = 0; i < e.size(); ++i) r[i] = mt.nu * mt.nu * e[i] + mt.eps * kerr(e[i], s);
        return r;
    };
    const Eigen::VectorXcd fm = f(em), f0 = f(e0), fp = f(ep);
    const TransverseParts te = transverse_parts(p.grid, o.closure, e0, m);
    const TransverseParts tf = transverse_parts(p.grid, o.closure, f0, m);
    return (ep[m] - 2.0 * e0[m] + em[m]) / (h * h) + te.d4 - h * h / 12.0 * te.bih +
           k02 * (f0[m] + (fp[m] - 2.0 * f0[m] + fm[m]) / 12.0 - h * h / 12.0 * tf.d2);
}

}  // namespace

cd residual_interior_cartesian(const Problem& p, const ComplexField2D& E, int n, int m) {
    if (p.grid.geometry != Geometry::Cartesian) throw Error(ErrorCode::InvalidConfig, "not a Cartesian problem");
    return bulk_row(p, E, n, m, bulk_material(p, n));
}

cd residual_interior_cylindrical(const Problem& p, const ComplexField2D& E, int n, int m) {
    if (p.grid.geometry != Geometry::Cylindrical) throw Error(ErrorCode::InvalidConfig, "not a cylindrical problem");
    return bulk_row(p, E, n, m, bulk_material(p, n));
}

cd residual_exterior(const Problem& p, const ComplexField2D& E, int n, int m) {
    return bulk_row(p, E, n, m, {1.0, 0.0});
}

cd residual_interface(const Problem& p, const ComplexField2D& E, int n, int m) {
    const double h = p.grid.hz(), k02 = p.mat.k0 * p.mat.k0;
    InterfaceMaterial im = interface_material(p, n);
    const TransverseOps& o = p.opsFor(std::sqrt(im.nu2));
    const auto& w7 = interface_7node();
    cd d = 0.0;
    for (size_t j = 0; j < w7.offsets.size(); ++j) d += w7.weights[j] * column(p, E, n + w7.offsets[j])[m];
    const Eigen::VectorXcd e0 = column(p, E, n);
    const TransverseParts t = transverse_parts(p.grid, o.closure, e0, m);
    return d / h + 6.0 * h * k02 / 11.0 * (im.nu2 * e0[m] + im.eps * kerr(e0[m], p.mat.sigma)) +
           6.0 * h / 11.0 * t.d4;
}

cd residual_row(const Problem& p, const ComplexField2D& E, int n, int m) {
    switch (p.nodes.at(n)) {
        case NodeClass::Interface: return residual_interface(p, E, n, m);
        case NodeClass::Interior: return bulk_row(p, E, n, m, bulk_material(p, n));
        default: return residual_exterior(p, E, n, m);
    }
}

Eigen::VectorXcd residual_form(const Problem& p, const Eigen::VectorXcd& E) {
    Eigen::VectorXcd P(E.size());
    for (Eigen::Index i = 0; i < E.size(); ++i) P[i] = kerr(E[i], p.form.sigma);
    Eigen::VectorXcd F = p.form.AE * E - p.form.b;
    if (p.form.AP.nonZeros() > 0) F += p.form.AP * P;
    return F;
}

Eigen::VectorXd assemble_residual(const Problem& p, const ComplexField2D& E) {
    return to_real_split(residual_form(p, E.vec()));
}

Eigen::Matrix2d kerr_jacobian_block(cd E, double sigma) {
    Eigen::Matrix2d K = Eigen::Matrix2d::Zero();
    const double er = E.real(), ei = E.imag(), A = er * er + ei * ei;
    if (A == 0.0) return K;
    const double As = std::pow(A, sigma), As1 = 2.0 * sigma * std::pow(A, sigma - 1.0);
    K(0, 0) = As + As1 * er * er;
    K(0, 1) = K(1, 0) = As1 * er * ei;
    K(1, 1) = As + As1 * ei * ei;
    return K;
}

JacobianAssembler::JacobianAssembler(const SystemForm& form) : sigma_(form.sigma) {
    const Eigen::Index n = form.AE.rows();
    std::vector<Eigen::Triplet<double>> t;
    struct Raw {
        int row, col;
        cd ae, ap;
    };
    std::vector<Raw> raw;
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::SparseMatrix<cd>::InnerIterator ie(form.AE, c), ip(form.AP, c);
        while (ie || ip) {
            if (ie && (!ip || ie.row() < ip.row())) {
                raw.push_back({static_cast<int>(ie.row()), static_cast<int>(c), ie.value(), 0.0});
                ++ie;
            } else if (ip && (!ie || ip.row() < ie.row())) {
                raw.push_back({static_cast<int>(ip.row()), static_cast<int>(c), 0.0, ip.value()});
                ++ip;
            } else {
                raw.push_back({static_cast<int>(ie.row()), static_cast<int>(c), ie.value(), ip.value()});
                ++ie;
                ++ip;
            }
        }
    }
    t.reserve(raw.size() * 4);
    for (const auto& r : raw)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) t.emplace_back(2 * r.row + a, 2 * r.col + b, 0.0);
    J_.resize(2 * n, 2 * n);
    J_.setFromTriplets(t.begin(), t.end());
    J_.makeCompressed();
    auto find = [&](int row, int col) {
        const int* inner = J_.innerIndexPtr();
        const int* beg = inner + J_.outerIndexPtr()[col];
        const int* end = inner + J_.outerIndexPtr()[col + 1];
        return static_cast<int>(std::lower_bound(beg, end, row) - inner);
    };
    blocks_.reserve(raw.size());
    for (const auto& r : raw) blocks_.push_back({r.ae, r.ap, r.col, find(2 * r.row, 2 * r.col), find(2 * r.row, 2 * r.col + 1)});
}

const Eigen::SparseMatrix<double>& JacobianAssembler::fill(const Eigen::VectorXcd& E) {
    double* v = J_.valuePtr();
    for (const auto& b : blocks_) {
        double j00 = b.ae.real(), j01 = -b.ae.imag(), j10 = b.ae.imag(), j11 = b.ae.real();
        if (b.ap != 0.0) {
            const Eigen::Matrix2d K = kerr_jacobian_block(E[b.col], sigma_);
            const double pr = b.ap.real(), pi = b.ap.imag();
            j00 += pr * K(0, 0) - pi * K(1, 0);
            j01 += pr * K(0, 1) - pi * K(1, 1);
            j10 += pi * K(0, 0) + pr * K(1, 0);
            j11 += pi * K(0, 1) + pr * K(1, 1);
        }
        v[b.v0] = j00;
        v[b.v0 + 1] = j10;
        v[b.v1] = j01;
        v[b.v1 + 1] = j11;
    }
    return J_;
}

Eigen::SparseMatrix<double> assemble_jacobian(const Problem& p, const ComplexField2D& E) {
    JacobianAssembler a(p.form);
    return a.fill(E.vec());
}

}  // namespace nlh
