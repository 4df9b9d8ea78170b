#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlh/beams.hpp"
#include "nlh/errors.hpp"
#include "nlh/helmholtz1d.hpp"
#include "nlh/solvers.hpp"

using namespace nlh;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::IoError;
}

Eigen::VectorXcd sample(const GridND& g, auto&& f) {
    Eigen::VectorXcd v(g.M);
    for (int m = 0; m < g.M; ++m) v[m] = f(g.x(m));
    return v;
}

}  // namespace

TEST_CASE("adjusted sech beam peak") {
    const double k0 = 4.0, eps = 1.0 / 16.0;
    const GridND g = as_nd(build_grid_1d(1.0, 8));
    const MaterialStack mat = homogeneous_slab(k0, 1.0, 1.0, 1.0, eps);
    BeamSpec b;
    b.kind = BeamKind::Sech;
    b.width = std::sqrt(2.0);
    b.adjust = true;
    const Eigen::VectorXcd v = make_incoming(b, g, mat);
    CHECK(std::abs(v[0]) == doctest::Approx((1.0 + std::sqrt(1.0 + eps)) / 2.0));
    CHECK(std::abs(v[0]) == doctest::Approx(1.0155).epsilon(1e-4));
}

TEST_CASE("adjustment factor") {
    Eigen::VectorXcd e(3);
    e << cd(1.0, 0.0), cd(0.0, 2.0), cd(-0.5, 0.5);
    CHECK(adjust_for_nls(e, 1.0, 0.0, 1.0) == e);
    Eigen::VectorXcd one(1);
    one[0] = std::sqrt(3.0);
    CHECK(std::abs(adjust_for_nls(one, 1.0, 1.0, 1.0)[0] / one[0] - 1.5) < 1e-14);
    CHECK(code_of([&] { adjust_for_nls(one, 1.0, -1.0, 1.0); }) == ErrorCode::AdjustmentUndefined);
    CHECK(code_of([&] { adjust_for_nls(one, 0.0, 0.1, 1.0); }) == ErrorCode::InvalidMaterial);
}

TEST_CASE("adjusted beam uses the layer on its own side") {
    const GridND g = build_grid_nd(Geometry::Cartesian, 2.0, 16, 3.0, 16);
    MaterialStack mat = homogeneous_slab(4.0, 1.0, 2.0, 1.0, 0.0);
    mat.layers = {{0.0, 1.0, 1.0, 0.2}, {1.0, 2.0, 1.0, 0.0}};
    BeamSpec b;
    b.adjust = true;
    const Eigen::VectorXcd raw = sample(g, [](double x) { return std::exp(-x * x); });
    CHECK((make_incoming(b, g, mat) - adjust_for_nls(raw, 1.0, 0.2, 1.0)).cwiseAbs().maxCoeff() < 1e-15);
    b.side = Side::Right;
    CHECK((make_incoming(b, g, mat) - raw).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("Gaussian samples on the radial grid") {
    const GridND g = build_grid_nd(Geometry::Cylindrical, 2.0, 16, 3.0, 24);
    const MaterialStack mat = homogeneous_slab(8.0, 1.0, 2.0, 1.0, 0.15);
    const Eigen::VectorXcd v = make_incoming(BeamSpec{}, g, mat);
    for (int m = 0; m < 24; ++m) CHECK(v[m].real() == doctest::Approx(std::exp(-g.x(m) * g.x(m))));
}

TEST_CASE("tilted beams") {
    const GridND g = build_grid_nd(Geometry::Cartesian, 2.0, 16, 3.0, 32);
    const MaterialStack mat = homogeneous_slab(4.0, 1.0, 2.0, 1.0, 0.0);
    BeamSpec b;
    b.tiltAngle = -kPi / 4;
    b.center = 0.5;
    const Eigen::VectorXcd v = make_incoming(b, g, mat);
    const double kx = 4.0 * std::sin(-kPi / 4);
    for (int m = 0; m < 32; ++m) {
        const cd want = std::exp(-(g.x(m) - 0.5) * (g.x(m) - 0.5)) * std::exp(cd(0.0, kx * (g.x(m) - 0.5)));
        CHECK(std::abs(v[m] - want) < 1e-14);
    }
    const GridND c = build_grid_nd(Geometry::Cylindrical, 2.0, 16, 3.0, 16);
    CHECK(code_of([&] { make_incoming(b, c, mat); }) == ErrorCode::UnsupportedTilt);
    b.tiltAngle = kPi / 2;
    CHECK_THROWS_AS(make_incoming(b, g, mat), Error);
}

TEST_CASE("custom beams") {
    const GridND g = build_grid_nd(Geometry::Cartesian, 2.0, 16, 3.0, 8);
    const MaterialStack mat = homogeneous_slab(4.0, 1.0, 2.0, 1.0, 0.0);
    BeamSpec b;
    b.kind = BeamKind::Custom;
    b.samples.assign(8, cd(0.5, 0.5));
    CHECK(make_incoming(b, g, mat)[3] == cd(0.5, 0.5));
    b.samples.resize(7);
    CHECK(code_of([&] { make_incoming(b, g, mat); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("NLS soliton profile") {
    const double k0 = 4.0, eps = 1.0 / 16.0, r0 = std::sqrt(2.0);
    CHECK(std::abs(soliton_profile(k0, eps, r0, 0.0)) == doctest::Approx(1.0));
    CHECK(std::abs(soliton_profile(k0, eps, r0, 60.0)) < 1e-15);
    CHECK(1.0 / (k0 * r0) == doctest::Approx(1.0 / std::sqrt(32.0)));
    CHECK(1.0 / (k0 * r0) == doctest::Approx(0.177).epsilon(1e-3));
    const double z = 2.3;
    const cd s = soliton_profile(k0, eps, r0, 0.0, z);
    CHECK(std::arg(s) == doctest::Approx(std::remainder(k0 * z * (1.0 + 1.0 / 64.0), 2 * kPi)));
}

TEST_CASE("Poynting flux of plane waves") {
    const double k0 = 4.0, Z = 3.0;
    const MaterialStack mat = homogeneous_slab(k0, 1.0, Z, 1.0, 0.0);
    const cd A(0.8, 0.3), B(0.2, -0.35);
    std::vector<double> err;
    for (int N : {60, 120, 240}) {
        const GridND g = as_nd(build_grid_1d(Z, N));
        ComplexField2D E(N, 1), W(N, 1);
        for (int n = -3; n <= N + 3; ++n) {
            const double z = g.z.z(n);
            E(n, 0) = A * std::exp(cd(0.0, k0 * z));
            W(n, 0) = E(n, 0) + B * std::exp(cd(0.0, -k0 * z));
        }
        const FluxProfile f = poynting_flux(E, g, mat), w = poynting_flux(W, g, mat);
        double e = 0.0;
        for (int n = 0; n <= N; ++n) {
            e = std::max(e, std::abs(f.sz(n, 0) - std::norm(A)));
            CHECK(w.sz(n, 0) == doctest::Approx(std::norm(A) - std::norm(B)).epsilon(2e-3));
        }
        err.push_back(e);
        CHECK(power_deviation(f) < 1e-3);
        if (N == 240) {
            std::vector<double> s(N + 1);
            for (int n = 0; n <= N; ++n) s[n] = std::norm(W(n, 0));
            const Spectrum sp = oscillation_spectrum(s, g.hz());
            CHECK(sp.frequency == doctest::Approx(2.0 * k0).epsilon(0.05));
        }
    }
    CHECK(err[0] / err[1] == doctest::Approx(16.0).epsilon(0.2));
    CHECK(err[1] / err[2] == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("beam power quadrature weights") {
    const double k0 = 4.0;
    for (Geometry geo : {Geometry::Cartesian, Geometry::Cylindrical}) {
        const GridND g = build_grid_nd(geo, 2.0, 40, 4.0, 64);
        const MaterialStack mat = homogeneous_slab(k0, 1.0, 2.0, 1.0, 0.0);
        ComplexField2D E(40, 64);
        for (int n = -3; n <= 43; ++n)
            for (int m = 0; m < 64; ++m) E(n, m) = std::exp(-g.x(m) * g.x(m)) * std::exp(cd(0.0, k0 * g.z.z(n)));
        const FluxProfile f = poynting_flux(E, g, mat);
        // integral of exp(-2x^2): sqrt(pi/2) over the line, 1/4 against rho (midpoint rule, O(h^2))
        const double want = geo == Geometry::Cartesian ? std::sqrt(kPi / 2.0) : 0.25;
        CHECK(f.powerAt(20) == doctest::Approx(want).epsilon(1e-3));
    }
}

TEST_CASE("oscillation spectrum") {
    const double k0 = 4.0, h = 0.05;
    std::vector<double> s(400);
    for (int i = 0; i < 400; ++i) s[i] = 1.0 + 0.1 * std::cos(2.0 * k0 * i * h);
    const Spectrum sp = oscillation_spectrum(s, h);
    const double bin = 2.0 * kPi / (400 * h);
    CHECK(!sp.noPeak);
    CHECK(std::abs(sp.frequency - 2.0 * k0) < bin);
    CHECK(oscillation_spectrum(std::vector<double>(100, 2.0), h).noPeak);
    CHECK(code_of([&] { oscillation_spectrum(std::vector<double>(63, 1.0), h); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("NLS march: linear diffraction of a Gaussian") {
    const double k0 = 4.0, w0 = 1.0;
    for (Geometry geo : {Geometry::Cartesian, Geometry::Cylindrical}) {
        const GridND g = build_grid_nd(geo, 1.0, 8, geo == Geometry::Cartesian ? 12.0 : 8.0, 400);
        const Eigen::VectorXcd p0 = sample(g, [&](double x) { return std::exp(-x * x / (w0 * w0)); });
        NlsConfig c;
        c.k0 = k0;
        c.dz = 0.05;
        c.zEnd = 4.0;
        const NlsResult r = nls_march(g, p0, c);
        CHECK(!r.blowUp);
        const double z = r.z.back();
        CHECK(z == doctest::Approx(4.0));
        const double w2 = w0 * w0 * (1.0 + std::pow(2.0 * z / (k0 * w0 * w0), 2));
        // <x^2> = w^2/4 on a line, <rho^2> = w^2/2 in the plane
        const double want = geo == Geometry::Cartesian ? w2 / 4.0 : w2 / 2.0;
        CHECK(r.secondMoment.back() == doctest::Approx(want).epsilon(0.01));
        CHECK(second_moment(g, p0) == doctest::Approx(geo == Geometry::Cartesian ? 0.25 : 0.5).epsilon(1e-4));
    }
}

TEST_CASE("NLS march: the soliton keeps its shape") {
    const double k0 = 4.0, eps = 1.0 / 16.0, r0 = std::sqrt(2.0);
    const GridND g = build_grid_nd(Geometry::Cartesian, 1.0, 8, 12.0, 240);
    const Eigen::VectorXcd p0 = sample(g, [&](double x) { return soliton_profile(k0, eps, r0, x); });
    NlsConfig c;
    c.k0 = k0;
    c.eps = eps;
    c.dz = 0.05;
    c.zEnd = 40.0;
    const NlsResult r = nls_march(g, p0, c);
    CHECK(!r.blowUp);
    double drift = 0.0;
    for (double p : r.peak) drift = std::max(drift, std::abs(p / r.peak.front() - 1.0));
    CHECK(drift <= 0.01);
}

TEST_CASE("NLS march: supercritical cylindrical Gaussian collapses") {
    const double k0 = 8.0, eps = 0.15;
    const GridND g = build_grid_nd(Geometry::Cylindrical, 9.0, 8, 3.5, 1400);
    BeamSpec b;
    const double p = critical_power_ratio(eps, k0, b, Geometry::Cylindrical, 1.0);
    CHECK(p == doctest::Approx(1.29).epsilon(0.005));
    const Eigen::VectorXcd p0 = sample(g, [&](double x) { return beam_shape(b, x); });
    NlsConfig c;
    c.k0 = k0;
    c.eps = eps;
    c.dz = 0.01;
    c.zEnd = 9.0;
    const NlsResult r = nls_march(g, p0, c);
    CHECK(r.blowUp);
    CHECK(r.zStar > 4.0);
    CHECK(r.zStar < 9.0);
    // subcritical power spreads instead
    c.eps = 0.1;
    c.zEnd = 6.0;
    CHECK(!nls_march(g, p0, c).blowUp);
}

TEST_CASE("critical power ratio") {
    BeamSpec b;
    CHECK(critical_power_ratio(0.15, 8.0, b, Geometry::Cylindrical, 1.0) == doctest::Approx(1.2888).epsilon(1e-4));
    CHECK(critical_power_ratio(1e-12, 8.0, b, Geometry::Cylindrical, 1.0) < 1e-10);
    const double k0 = 8.0;
    CHECK(critical_power_ratio(4.0 * 1.8623 / (k0 * k0), k0, b, Geometry::Cylindrical, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(critical_power_ratio(0.125, 8.0, b, Geometry::Cartesian, 2.0) == doctest::Approx(1.30).epsilon(0.005));
    CHECK(critical_power_ratio(0.12, 8.0, b, Geometry::Cartesian, 2.0) == doctest::Approx(1.28).epsilon(0.005));
    b.kind = BeamKind::Sech;
    CHECK(code_of([&] { critical_power_ratio(0.15, 8.0, b, Geometry::Cylindrical, 1.0); }) ==
          ErrorCode::UnsupportedProfile);
}

TEST_CASE("restriction to coarse cell centres") {
    for (Geometry geo : {Geometry::Cartesian, Geometry::Cylindrical}) {
        const GridND f = build_grid_nd(geo, 1.0, 16, 2.0, 32);
        const GridND c = build_grid_nd(geo, 1.0, 8, 2.0, 16);
        // cubic data on a line, even data in the radius
        auto u = [&](double x) { return geo == Geometry::Cartesian ? 1.0 + x - 0.5 * x * x + 0.2 * x * x * x : 2.0 - x * x; };
        const Eigen::VectorXcd r = restrict_to_coarse(f, sample(f, u));
        for (int m = 0; m < 16; ++m) CHECK(r[m].real() == doctest::Approx(u(c.x(m))).epsilon(1e-12));
    }
}

TEST_CASE("convergence study on a manufactured 1D problem") {
    const double k0 = 4.0, Z = 2.0;
    const MaterialStack mat = homogeneous_slab(k0, 1.0, Z, 1.3, 0.0);
    std::vector<GridND> grids;
    std::vector<ComplexField2D> fields;
    for (int N : {40, 80, 160, 320}) {
        grids.push_back(as_nd(build_grid_1d(Z, N)));
        fields.push_back(solve_1d(grids.back().z, mat, {1.0, 0.0}, SolverConfig{}).first);
    }
    const auto rows = grid_convergence_study(grids, fields);
    REQUIRE(rows.size() == 3);
    CHECK(!rows[0].rate);
    for (size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].rate);
        CHECK(*rows[i].rate >= 3.5);
        CHECK(*rows[i].rate <= 4.5);
        CHECK(rows[i - 1].log2diff - rows[i].log2diff == doctest::Approx(*rows[i].rate));
    }
    std::vector<GridND> bad{grids[0], grids[2]};
    std::vector<ComplexField2D> badF{fields[0], fields[2]};
    CHECK(code_of([&] { grid_convergence_study(bad, badF); }) == ErrorCode::NonNestedGrids);
}

TEST_CASE("forward component of counter-propagating waves") {
    const double k0 = 4.0, nu = 1.3, Z = 2.0;
    const cd A(0.7, 0.2), B(-0.1, 0.3);
    std::vector<double> err;
    for (int N : {40, 80, 160}) {
        const GridND g = build_grid_nd(Geometry::Cartesian, Z, N, 4.0 * Z / N, 8);
        const MaterialStack mat = homogeneous_slab(k0, 1.0, Z, nu, 0.0);
        ComplexField2D E(N, 8);
        for (int n = -3; n <= N + 3; ++n)
            for (int m = 0; m < 8; ++m) {
                const double z = g.z.z(n);
                E(n, m) = A * std::exp(cd(0.0, nu * k0 * z)) + B * std::exp(cd(0.0, -nu * k0 * z));
            }
        double e = 0.0;
        for (int n : {0, N / 2}) {
            const Eigen::VectorXcd f = forward_component(E, g, mat, n);
            e = std::max(e, std::abs(f[3] - A * std::exp(cd(0.0, nu * k0 * g.z.z(n)))));
        }
        err.push_back(e);
    }
    CHECK(err[0] < 1e-3);
    CHECK(err[0] / err[1] == doctest::Approx(16.0).epsilon(0.2));
    CHECK(err[1] / err[2] == doctest::Approx(16.0).epsilon(0.2));
}
