#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "nlh/errors.hpp"
#include "nlh/helmholtz1d.hpp"
#include "nlh/solvers.hpp"
#include "nlh/sparse_lu.hpp"

using namespace nlh;

namespace {

Problem small_problem(Geometry geo, double eps, double sigma = 1.0, double amp = 1.0) {
    const double Z = 3.0, X = 3.0, k0 = 4.0;
    const int N = 24, M = 16;
    const GridND g = build_grid_nd(geo, Z, N, X, M);
    MaterialStack mat;
    mat.k0 = k0;
    mat.sigma = sigma;
    mat.layers = {{0.0, 1.5, 1.0, eps}, {1.5, 3.0, 1.0, 2.0 * eps}};
    Eigen::VectorXcd inc(M);
    for (int m = 0; m < M; ++m) inc[m] = amp * std::exp(-g.x(m) * g.x(m));
    return make_problem(g, mat, inc, Eigen::VectorXcd::Zero(M));
}

double field_diff(const ComplexField2D& a, const ComplexField2D& b) { return (a.vec() - b.vec()).cwiseAbs().maxCoeff(); }

// textbook Gaussian elimination with partial pivoting
Eigen::VectorXd dense_oracle(Eigen::MatrixXd A, Eigen::VectorXd b) {
    const int n = static_cast<int>(A.rows());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
        A.row(k).swap(A.row(piv));
        std::swap(b[k], b[piv]);
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) / A(k, k);
            A.row(i) -= f * A.row(k);
            b[i] -= f * b[k];
        }
    }
    Eigen::VectorXd x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

}  // namespace

TEST_CASE("solver config validation") {
    SolverConfig c;
    CHECK_NOTHROW(validate(c));
    c.omega = 0.0;
    CHECK_THROWS_AS(validate(c), Error);
    c.omega = 1.5;
    CHECK_THROWS_AS(validate(c), Error);
    c = SolverConfig{};
    c.convergenceTol = -1.0;
    CHECK_THROWS_AS(validate(c), Error);
    CHECK(parse_solver(solver_name(SolverKind::Born)) == SolverKind::Born);
    CHECK_THROWS_AS(parse_solver("gmres"), Error);
}

TEST_CASE("sparse LU") {
    SUBCASE("identity") {
        Eigen::SparseMatrix<double> I(50, 50);
        I.setIdentity();
        const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(50, -1.0, 2.0);
        CHECK(sparse_lu_solve(I, b) == b);
    }
    SUBCASE("banded matrix against dense elimination") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const int n = 300, bw = 7;
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = std::max(0, i - bw); j <= std::min(n - 1, i + bw); ++j) D(i, j) = u(rng);
        D = D * D.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd b(n);
        for (auto& v : b) v = u(rng);
        const Eigen::SparseMatrix<double> S = D.sparseView();
        const Eigen::VectorXd x = sparse_lu_solve(S, b), y = dense_oracle(D, b);
        CHECK((x - y).lpNorm<Eigen::Infinity>() <= 1e-10 * y.lpNorm<Eigen::Infinity>());
        CHECK((S * x - b).lpNorm<Eigen::Infinity>() <= 1e-10 * (D.cwiseAbs().rowwise().sum().maxCoeff() *
                                                                     x.lpNorm<Eigen::Infinity>() +
                                                                 b.lpNorm<Eigen::Infinity>()));
    }
    SUBCASE("complex system") {
        const int n = 120;
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            D(i, i) = cd(4.0, 0.5 * i / n);
            if (i > 0) D(i, i - 1) = cd(-1.0, 0.3);
            if (i + 1 < n) D(i, i + 1) = cd(-1.0, -0.2);
        }
        const Eigen::VectorXcd b = Eigen::VectorXcd::Constant(n, cd(1.0, -1.0));
        const Eigen::VectorXcd x = sparse_lu_solve(Eigen::SparseMatrix<cd>(D.sparseView()), b);
        CHECK((D * x - b).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("singular") {
        Eigen::SparseMatrix<double> Z(10, 10);
        for (int i = 0; i < 9; ++i) Z.insert(i, i) = 1.0;
        try {
            sparse_lu_solve(Z, Eigen::VectorXd::Ones(10));
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SingularMatrix);
        }
    }
}

TEST_CASE("tridiagonal solve") {
    const int n = 40;
    std::vector<cd> lo(n - 1, cd(1.0, 0.2)), up(n - 1, cd(0.5, -0.1)), di(n, cd(-0.3, 0.1)), rhs(n);
    di[7] = 0.0;  // forces a pivot swap
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        D(i, i) = di[i];
        if (i > 0) D(i, i - 1) = lo[i - 1];
        if (i + 1 < n) D(i, i + 1) = up[i];
        rhs[i] = cd(std::sin(i), std::cos(0.3 * i));
    }
    std::vector<cd> x = rhs;
    REQUIRE(tridiagonal_solve(lo, di, up, x));
    const Eigen::VectorXcd r = D * Eigen::Map<Eigen::VectorXcd>(x.data(), n) - Eigen::Map<Eigen::VectorXcd>(rhs.data(), n);
    const double xn = Eigen::Map<Eigen::VectorXcd>(x.data(), n).cwiseAbs().maxCoeff();
    CHECK(r.cwiseAbs().maxCoeff() < 1e-13 * D.cwiseAbs().rowwise().sum().maxCoeff() * xn);
}

TEST_CASE("Newton on a linear problem") {
    const Problem p = small_problem(Geometry::Cartesian, 0.0);
    auto [E, rep] = newton_solve(p, SolverConfig{});
    CHECK(rep.converged);
    CHECK(rep.iterations <= 40);
    CHECK(static_cast<int>(rep.history.size()) == rep.iterations);
    // from an arbitrary guess with full steps: one step lands on the solution
    SolverConfig full;
    full.omega = 1.0;
    full.switchThreshold = 1e300;
    full.initialGuess = InitialGuess::GivenField;
    ComplexField2D g(p.grid.N(), p.grid.M);
    for (auto& v : g.values()) v = cd(0.3, -0.7);
    auto [F, r2] = newton_solve(p, full, &g);
    CHECK(r2.converged);
    CHECK(r2.iterations <= 2);
    CHECK(field_diff(E, F) < 1e-10);
    CHECK(residual_form(p, F.vec()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("relaxed steps never exceed omega") {
    const Problem p = small_problem(Geometry::Cartesian, 0.1, 1.0, 4.0);
    SolverConfig c;
    c.omega = 0.5;
    c.maxIterations = 1;
    auto [E, rep] = newton_solve(p, c);
    REQUIRE(rep.history.size() == 1);
    CHECK(rep.history[0].stepNorm > 1.0);
    // the applied update from the zero guess is the field itself
    const Eigen::VectorXd r = to_real_split(E.vec());
    CHECK(r.lpNorm<Eigen::Infinity>() <= c.omega * (1.0 + 1e-14));
    CHECK(rep.divergenceReason == DivergenceReason::MaxIter);
}

TEST_CASE("Newton converges quadratically in the tail") {
    const Problem p = small_problem(Geometry::Cartesian, 0.1, 1.0, 2.0);
    auto [E, rep] = newton_solve(p, SolverConfig{});
    REQUIRE(rep.converged);
    std::vector<double> C;
    for (size_t j = 0; j + 1 < rep.history.size(); ++j) {
        const double s = rep.history[j].stepNorm, t = rep.history[j + 1].stepNorm;
        if (s < 0.01 && t > 1e-13) C.push_back(t / (s * s));
    }
    REQUIRE(C.size() >= 2);
    for (double c : C) {
        CHECK(c < 100.0);
        CHECK(c > 1e-3);
    }
    CHECK(rep.history.back().stepNorm < 1e-12);
    CHECK(rep.maxAmplitude == doctest::Approx(E.maxAbs()));
}

TEST_CASE("freezing and Born on linear problems") {
    const Problem p = small_problem(Geometry::Cartesian, 0.0);
    auto [E, rn] = newton_solve(p, SolverConfig{});
    SolverConfig f;
    f.kind = SolverKind::Freezing;
    auto [F, rf] = solve(p, f);
    CHECK(rf.converged);
    CHECK(rf.iterations == 1);
    CHECK(field_diff(E, F) < 1e-10);
    SolverConfig b;
    b.kind = SolverKind::Born;
    auto [B, rb] = solve(p, b);
    CHECK(rb.converged);
    CHECK(field_diff(E, B) < 1e-8);
}

TEST_CASE("separable solver is exact for the exterior-type operator") {
    // nu = 1, eps = 0 everywhere: only the z = 0 and z = Zmax rows differ from the separable operator
    const Problem p = small_problem(Geometry::Cylindrical, 0.0);
    const SeparableSolver S(p);
    std::mt19937 rng(9);
    std::normal_distribution<double> d;
    Eigen::VectorXcd x(p.unknowns());
    for (auto& v : x) v = cd(d(rng), d(rng));
    // apply the separable operator row by row via a bulk-row problem with no interfaces inside
    const Eigen::VectorXcd y = S.solve(x);
    CHECK(y.allFinite());
    // rows that are bulk rows of the assembled operator are reproduced
    const Eigen::VectorXcd Ay = p.form.AE * y;
    double worst = 0.0, scale = 0.0;
    for (int n = -3; n <= p.grid.N() + 3; ++n) {
        if (p.nodes.at(n) == NodeClass::Interface) continue;
        for (int m = 0; m < p.grid.M; ++m) {
            const int i = p.grid.index(n, m);
            worst = std::max(worst, std::abs(Ay[i] - x[i]));
            scale = std::max(scale, std::abs(x[i]));
        }
    }
    CHECK(worst <= 1e-9 * scale);
}

TEST_CASE("weakly nonlinear: all three solvers agree") {
    for (Geometry geo : {Geometry::Cartesian, Geometry::Cylindrical})
        for (double sigma : {1.0, 2.0}) {
            const Problem p = small_problem(geo, 0.05, sigma);
            auto [E, rn] = newton_solve(p, SolverConfig{});
            REQUIRE(rn.converged);
            for (SolverKind k : {SolverKind::Freezing, SolverKind::Born}) {
                SolverConfig c;
                c.kind = k;
                auto [F, r] = solve(p, c);
                CAPTURE(solver_name(k));
                REQUIRE(r.converged);
                CHECK(field_diff(E, F) <= 1e-8);
            }
        }
}

TEST_CASE("solves are deterministic") {
    const Problem p = small_problem(Geometry::Cartesian, 0.1, 1.0, 1.5);
    for (SolverKind k : {SolverKind::Newton, SolverKind::Freezing, SolverKind::Born}) {
        SolverConfig c;
        c.kind = k;
        auto [A, ra] = solve(p, c);
        auto [B, rb] = solve(p, c);
        CHECK(std::memcmp(A.data(), B.data(), sizeof(cd) * A.size()) == 0);
        CHECK(ra.iterations == rb.iterations);
        CHECK(ra.converged == rb.converged);
        for (size_t i = 0; i < ra.history.size(); ++i) {
            CHECK(ra.history[i].stepNorm == rb.history[i].stepNorm);
            CHECK(ra.history[i].residualNorm == rb.history[i].residualNorm);
        }
    }
}

TEST_CASE("strong focusing: divergence is reported, not thrown") {
    const Problem p = small_problem(Geometry::Cartesian, 0.5, 1.0, 6.0);
    SolverConfig c;
    c.kind = SolverKind::Born;
    c.maxIterations = 60;
    auto [E, r] = solve(p, c);
    if (!r.converged) {
        REQUIRE(r.divergenceReason.has_value());
        CHECK(static_cast<int>(r.history.size()) == r.iterations);
    }
}

TEST_CASE("given initial guess must match the grid") {
    const Problem p = small_problem(Geometry::Cartesian, 0.0);
    SolverConfig c;
    c.initialGuess = InitialGuess::GivenField;
    CHECK_THROWS_AS(newton_solve(p, c, nullptr), Error);
    ComplexField2D wrong(4, 8);
    CHECK_THROWS_AS(newton_solve(p, c, &wrong), Error);
}
