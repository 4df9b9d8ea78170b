#include <doctest.h>

#include <cmath>
#include <random>

#include "nlh/helmholtz1d.hpp"
#include "nlh/helmholtz_nd.hpp"

using namespace nlh;

namespace {

Problem linear_problem(Geometry geo, double Z, int N, double X, int M, double k0, double nu = 1.0) {
    const GridND g = build_grid_nd(geo, Z, N, X, M);
    const MaterialStack mat = homogeneous_slab(k0, 1.0, Z, nu, 0.0);
    return make_problem(g, mat, Eigen::VectorXcd::Zero(M), Eigen::VectorXcd::Zero(M));
}

Problem layered_problem(Geometry geo, double sigma, int N = 24, int M = 16) {
    const double Z = 3.0, X = 3.0, k0 = 4.0;
    const GridND g = build_grid_nd(geo, Z, N, X, M);
    MaterialStack mat;
    mat.k0 = k0;
    mat.sigma = sigma;
    mat.layers = {{0.0, 1.5, 1.2, 0.05}, {1.5, 3.0, 1.0, 0.1}};
    Eigen::VectorXcd inc(M);
    for (int m = 0; m < M; ++m) inc[m] = std::exp(-g.x(m) * g.x(m));
    return make_problem(g, mat, inc, 0.3 * inc);
}

ComplexField2D random_field(int N, int M, unsigned seed, double scale = 0.5) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    ComplexField2D E(N, M);
    for (auto& v : E.values()) v = scale * cd(d(rng), d(rng));
    return E;
}

}  // namespace

TEST_CASE("zero field, zero forcing") {
    const Problem p = linear_problem(Geometry::Cartesian, 2.0, 16, 2.0, 12, 4.0, 1.3);
    const ComplexField2D E(16, 12);
    CHECK(residual_form(p, E.vec()).cwiseAbs().maxCoeff() == 0.0);
    for (int n = -3; n <= 19; ++n)
        for (int m = 0; m < 12; ++m) CHECK(residual_row(p, E, n, m) == cd(0.0));
}

TEST_CASE("constant fields") {
    const double k0 = 4.0, eps = 0.2;
    const cd c(0.7, -0.4);
    SUBCASE("Cartesian cubic") {
        const GridND g = build_grid_nd(Geometry::Cartesian, 2.0, 16, 2.0, 16);
        const Problem p = make_problem(g, homogeneous_slab(k0, 1.0, 2.0, 1.0, eps), Eigen::VectorXcd::Zero(16),
                                       Eigen::VectorXcd::Zero(16));
        ComplexField2D E(16, 16);
        for (auto& v : E.values()) v = c;
        for (int n = 2; n <= 14; ++n)
            for (int m = 2; m < 14; ++m) {
                const cd want = k0 * k0 * (c + eps * std::norm(c) * c);
                CHECK(std::abs(residual_interior_cartesian(p, E, n, m) - want) < 1e-9 * std::abs(want));
            }
    }
    SUBCASE("cylindrical linear, including the axis cells") {
        const Problem p = linear_problem(Geometry::Cylindrical, 2.0, 16, 2.0, 16, k0);
        ComplexField2D E(16, 16);
        for (auto& v : E.values()) v = c;
        for (int n = 2; n <= 14; ++n)
            for (int m = 0; m < 13; ++m) {
                const cd want = k0 * k0 * c;
                CHECK(std::abs(residual_interior_cylindrical(p, E, n, m) - want) < 1e-9 * std::abs(want));
            }
    }
}

TEST_CASE("exact plane wave: interior rows are fourth order") {
    const double k0 = 4.0, nu = 1.3, kx = 2.0;
    const double kz = std::sqrt(nu * nu * k0 * k0 - kx * kx);
    std::vector<double> err;
    for (int s : {1, 2, 4}) {
        const int N = 24 * s, M = 32 * s;
        const Problem p = linear_problem(Geometry::Cartesian, 3.0, N, 4.0, M, k0, nu);
        ComplexField2D E(N, M);
        for (int n = -3; n <= N + 3; ++n)
            for (int m = 0; m < M; ++m) E(n, m) = std::exp(cd(0.0, kz * p.grid.z.z(n) + kx * p.grid.x(m)));
        double e = 0.0;
        for (int n = 1; n < N; ++n)
            for (int m = 3; m < M - 3; ++m) e = std::max(e, std::abs(residual_interior_cartesian(p, E, n, m)));
        err.push_back(e);
    }
    CHECK(err[0] / err[1] == doctest::Approx(16.0).epsilon(0.15));
    CHECK(err[1] / err[2] == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("exact Bessel beam: cylindrical rows are fourth order") {
    const double k0 = 4.0, kr = 2.5;
    const double kz = std::sqrt(k0 * k0 - kr * kr);
    std::vector<double> err, axis;
    for (int s : {1, 2, 4}) {
        const int N = 24 * s, M = 24 * s;
        const Problem p = linear_problem(Geometry::Cylindrical, 3.0, N, 3.0, M, k0);
        ComplexField2D E(N, M);
        for (int n = -3; n <= N + 3; ++n)
            for (int m = 0; m < M; ++m)
                E(n, m) = std::cyl_bessel_j(0.0, kr * p.grid.x(m)) * std::exp(cd(0.0, kz * p.grid.z.z(n)));
        double e = 0.0, a = 0.0;
        for (int n = 1; n < N; ++n) {
            for (int m = 2; m < M - 3; ++m) e = std::max(e, std::abs(residual_interior_cylindrical(p, E, n, m)));
            for (int m = 0; m < 2; ++m) a = std::max(a, std::abs(residual_interior_cylindrical(p, E, n, m)));
        }
        err.push_back(e);
        axis.push_back(a);
    }
    CHECK(err[0] / err[1] == doctest::Approx(16.0).epsilon(0.2));
    CHECK(err[1] / err[2] == doctest::Approx(16.0).epsilon(0.2));
    // the rho^-3 weight of the correction term costs two orders in the first two cells
    CHECK(axis[0] / axis[1] > 2.5);
    CHECK(axis[1] / axis[2] > 2.5);
}

TEST_CASE("interface row on a smooth solution with matched materials") {
    const double k0 = 4.0, kx = 1.5;
    const double kz = std::sqrt(k0 * k0 - kx * kx);
    std::vector<double> err;
    for (int s : {1, 2, 4}) {
        const int N = 24 * s, M = 32 * s;
        const GridND g = build_grid_nd(Geometry::Cartesian, 3.0, N, 4.0, M);
        MaterialStack mat = homogeneous_slab(k0, 1.0, 3.0, 1.0, 0.0);
        mat.layers = {{0.0, 1.5, 1.0, 0.0}, {1.5, 3.0, 1.0, 0.0}};
        const Problem p = make_problem(g, mat, Eigen::VectorXcd::Zero(M), Eigen::VectorXcd::Zero(M));
        ComplexField2D E(N, M);
        for (int n = -3; n <= N + 3; ++n)
            for (int m = 0; m < M; ++m) E(n, m) = std::exp(cd(0.0, kz * g.z.z(n) + kx * g.x(m)));
        double e = 0.0;
        for (int m = 3; m < M - 3; ++m) e = std::max(e, std::abs(residual_interface(p, E, N / 2, m)));
        // continuity row scaled back to a second-order operator: 11/(6h)
        err.push_back(e * 11.0 / (6.0 * g.hz()));
    }
    CHECK(err[0] / err[1] == doctest::Approx(16.0).epsilon(0.2));
    CHECK(err[1] / err[2] == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("one-dimensional limit matches the 1D assembly") {
    const double k0 = 4.0, Z = 2.0;
    const Grid1D g = build_grid_1d(Z, 40);
    MaterialStack mat = homogeneous_slab(k0, 2.0, Z, 1.0, 0.0);
    mat.layers = {{0.0, 0.8, 1.4, 0.1}, {0.8, 2.0, 1.1, -0.05}};
    Eigen::VectorXcd l(1), r(1);
    l[0] = cd(1.0, 0.2);
    r[0] = cd(-0.3, 0.1);
    const Problem p = make_problem(as_nd(g), mat, l, r);
    const ComplexField2D E = random_field(40, 1, 3);
    const Eigen::VectorXcd a = residual_1d(g, mat, {l[0], r[0]}, E.vec());
    const Eigen::VectorXcd b = residual_form(p, E.vec());
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("stencil route and sparse-form route agree") {
    for (Geometry geo : {Geometry::Cartesian, Geometry::Cylindrical})
        for (double sigma : {1.0, 2.0}) {
            const Problem p = layered_problem(geo, sigma);
            const ComplexField2D E = random_field(24, 16, 11);
            const Eigen::VectorXcd F = residual_form(p, E.vec());
            double diff = 0.0;
            for (int n = -3; n <= 27; ++n)
                for (int m = 0; m < 16; ++m)
                    diff = std::max(diff, std::abs(residual_row(p, E, n, m) - F[p.grid.index(n, m)]));
            CHECK(diff <= 1e-12 * F.cwiseAbs().maxCoeff());
        }
}

TEST_CASE("assembly is deterministic") {
    const Problem p = layered_problem(Geometry::Cartesian, 1.0);
    const ComplexField2D E = random_field(24, 16, 5);
    const Eigen::VectorXd a = assemble_residual(p, E), b = assemble_residual(p, E);
    CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
    const Problem q = layered_problem(Geometry::Cartesian, 1.0);
    const Eigen::VectorXd c = assemble_residual(q, E);
    CHECK(std::memcmp(a.data(), c.data(), sizeof(double) * a.size()) == 0);
}

TEST_CASE("real split round trip") {
    const ComplexField2D E = random_field(8, 8, 2);
    const Eigen::VectorXd r = to_real_split(E.vec());
    CHECK(r.size() == 2 * static_cast<Eigen::Index>(E.size()));
    CHECK(r[0] == E.values()[0].real());
    CHECK(r[1] == E.values()[0].imag());
    CHECK(from_real_split(r) == E.vec());
}

TEST_CASE("Kerr Jacobian blocks") {
    Eigen::Matrix2d a = kerr_jacobian_block(cd(1.0, 0.0), 1.0);
    CHECK(a(0, 0) == 3.0);
    CHECK(a(0, 1) == 0.0);
    CHECK(a(1, 1) == 1.0);
    CHECK(kerr_jacobian_block(cd(0.0), 1.0).isZero());
    Eigen::Matrix2d b = kerr_jacobian_block(cd(1.0, 1.0), 2.0);
    CHECK(b(0, 0) == doctest::Approx(12.0));
    CHECK(b(0, 1) == doctest::Approx(8.0));
    CHECK(b(1, 0) == doctest::Approx(8.0));
    CHECK(b(1, 1) == doctest::Approx(12.0));
    // central differences of P
    for (double sigma : {1.0, 2.0, 1.5}) {
        const cd e(0.6, -1.1);
        const double t = 1e-6;
        const Eigen::Matrix2d K = kerr_jacobian_block(e, sigma);
        for (int j = 0; j < 2; ++j) {
            const cd d = j == 0 ? cd(t, 0.0) : cd(0.0, t);
            const cd fd = (kerr(e + d, sigma) - kerr(e - d, sigma)) / (2.0 * t);
            CHECK(std::abs(fd.real() - K(0, j)) <= 1e-6 * K.cwiseAbs().maxCoeff());
            CHECK(std::abs(fd.imag() - K(1, j)) <= 1e-6 * K.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("Jacobian matches finite differences of the residual") {
    std::mt19937 rng(17);
    std::normal_distribution<double> d;
    for (Geometry geo : {Geometry::Cartesian, Geometry::Cylindrical})
        for (double sigma : {1.0, 2.0}) {
            const Problem p = layered_problem(geo, sigma);
            const ComplexField2D E = random_field(24, 16, 23);
            const Eigen::SparseMatrix<double> J = assemble_jacobian(p, E);
            const Eigen::VectorXd F0 = assemble_residual(p, E);
            double worst = 0.0;
            for (int k = 0; k < 10; ++k) {
                Eigen::VectorXd v(J.cols());
                for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = d(rng);
                const double tau = 1e-6;
                const Eigen::VectorXcd dv = from_real_split(v);
                const Eigen::VectorXd fp = to_real_split(residual_form(p, E.vec() + tau * dv));
                const Eigen::VectorXd fm = to_real_split(residual_form(p, E.vec() - tau * dv));
                const Eigen::VectorXd Jv = J * v;
                worst = std::max(worst, ((fp - fm) / (2 * tau) - Jv).lpNorm<Eigen::Infinity>() /
                                            Jv.lpNorm<Eigen::Infinity>());
                if (k == 0) {
                    // one-sided differences converge at first order
                    auto one_sided = [&](double t) {
                        const Eigen::VectorXd f = to_real_split(residual_form(p, E.vec() + t * dv));
                        return ((f - F0) / t - Jv).lpNorm<Eigen::Infinity>();
                    };
                    const double r = one_sided(1e-3) / one_sided(5e-4);
                    CHECK(r == doctest::Approx(2.0).epsilon(0.1));
                }
            }
            CHECK(worst <= 1e-5);
        }
}

TEST_CASE("linear Jacobian does not depend on the field") {
    const Problem p = linear_problem(Geometry::Cartesian, 2.0, 16, 2.0, 12, 4.0, 1.3);
    const Eigen::SparseMatrix<double> a = assemble_jacobian(p, random_field(16, 12, 1));
    const Eigen::SparseMatrix<double> b = assemble_jacobian(p, random_field(16, 12, 2));
    CHECK((a - b).norm() == 0.0);
}

TEST_CASE("sparsity pattern bandwidths") {
    const int N = 24, M = 16;
    const Problem p = layered_problem(Geometry::Cartesian, 1.0, N, M);
    Eigen::SparseMatrix<cd> A = p.form.AE;
    A += p.form.AP;
    Eigen::SparseMatrix<cd, Eigen::RowMajor> R = A;
    for (int n = -3; n <= N + 3; ++n) {
        const NodeClass c = p.nodes.at(n);
        for (int m = 0; m < M; ++m) {
            const int row = p.grid.index(n, m);
            int dn = 0, dm = 0, blockCount = 0;
            for (Eigen::SparseMatrix<cd, Eigen::RowMajor>::InnerIterator it(R, row); it; ++it) {
                const int nn = static_cast<int>(it.col()) / M - 3, mm = static_cast<int>(it.col()) % M;
                dn = std::max(dn, std::abs(nn - n));
                dm = std::max(dm, std::abs(mm - m));
                blockCount += (nn == n);
            }
            if (c == NodeClass::Interface) {
                CHECK(dn == 3);
                CHECK(dm <= 2);
            } else if (c == NodeClass::AbcRow) {
                CHECK(dn == 1);
                CHECK(blockCount == M);  // dense modal block
            } else {
                CHECK(dn == 1);
                CHECK(dm <= 2);
            }
        }
    }
}

TEST_CASE("discrete modes are exact solutions of the linear exterior rows") {
    for (Geometry geo : {Geometry::Cartesian, Geometry::Cylindrical}) {
        const int N = 16, M = 32;
        const double k0 = 4.0;
        const Problem p0 = linear_problem(geo, 16 * 0.1, N, 2.5, M, k0);
        for (int l = 0; l < M; l += 3) {
            const Eigen::VectorXcd psi = p0.eig.Psi.col(l);
            const cd q = p0.eig.q[l];
            // incoming mode injected at the left, exact discrete solution everywhere (nu = 1)
            const Problem p = make_problem(p0.grid, p0.mat, psi, Eigen::VectorXcd::Zero(M));
            ComplexField2D E(N, M);
            for (int n = -3; n <= N + 3; ++n)
                for (int m = 0; m < M; ++m) E(n, m) = psi[m] * std::pow(q, n);
            const Eigen::VectorXcd F = residual_form(p, E.vec());
            double scale = 0.0, other = 0.0;
            for (int n = -3; n <= N + 3; ++n)
                for (int m = 0; m < M; ++m) {
                    scale = std::max(scale, std::abs(E(n, m)));
                    if (p.nodes.at(n) != NodeClass::Interface) other = std::max(other, std::abs(F[p.grid.index(n, m)]));
                }
            CAPTURE(l);
            CHECK(other <= 1e-11 * scale / (p.grid.hz() * p.grid.hz()));
            // left-outgoing mode, nothing incoming: the ABC row is transparent
            ComplexField2D O(N, M);
            for (int n = -3; n <= N + 3; ++n)
                for (int m = 0; m < M; ++m) O(n, m) = psi[m] * std::pow(q, -n);
            const Eigen::VectorXcd G = residual_form(p0, O.vec());
            double abc = 0.0, sc = 0.0;
            for (int m = 0; m < M; ++m) {
                abc = std::max(abc, std::abs(G[p.grid.index(-3, m)]));
                sc = std::max(sc, std::abs(O(-3, m)));
            }
            CHECK(abc <= 1e-11 * sc / (p.grid.hz() * p.grid.hz()));
        }
    }
}
