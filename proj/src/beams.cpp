#include "nlh/beams.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlh/errors.hpp"
#include "nlh/sparse_lu.hpp"
#include "nlh/stencils.hpp"

namespace nlh {

namespace {
constexpr double kTownesPower = 1.8623;  // critical power of the cylindrical cubic NLS, in units 1/(eps k0^2)
}

std::string beam_kind_name(BeamKind k) {
    switch (k) {
        case BeamKind::Sech: return "sech";
        case BeamKind::Gaussian: return "gaussian";
        case BeamKind::Custom: return "custom";
    }
    return "?";
}

BeamKind parse_beam_kind(const std::string& s) {
    if (s == "sech") return BeamKind::Sech;
    if (s == "gaussian") return BeamKind::Gaussian;
    if (s == "custom") return BeamKind::Custom;
    throw Error(ErrorCode::InvalidConfig, "unknown beam shape '" + s + "'");
}

void validate(const BeamSpec& b) {
    if (b.kind != BeamKind::Custom && !(b.width > 0.0))
        throw Error(ErrorCode::InvalidConfig, "beam width must be positive");
    if (!std::isfinite(b.amplitude) || !std::isfinite(b.center))
        throw Error(ErrorCode::InvalidConfig, "beam amplitude and center must be finite");
    if (!(std::abs(b.tiltAngle) < std::numbers::pi / 2))
        throw Error(ErrorCode::InvalidConfig, "beam tilt must satisfy |tilt| < pi/2");
}

cd beam_shape(const BeamSpec& b, double x) {
    const double u = (x - b.center) / b.width;
    switch (b.kind) {
        case BeamKind::Sech: return b.amplitude / std::cosh(u);
        case BeamKind::Gaussian: return b.amplitude * std::exp(-u * u);
        case BeamKind::Custom: break;
    }
    throw Error(ErrorCode::InvalidConfig, "custom beams are defined by samples only");
}

Eigen::VectorXcd adjust_for_nls(const Eigen::VectorXcd& nls, double nu, double eps, double sigma) {
    if (!(nu > 0.0)) throw Error(ErrorCode::InvalidMaterial, "adjustment needs nu > 0");
    Eigen::VectorXcd out(nls.size());
    for (Eigen::Index i = 0; i < nls.size(); ++i) {
        const double rad = nu * nu + eps * std::pow(std::abs(nls[i]), 2.0 * sigma);
        if (rad < 0.0) throw Error(ErrorCode::AdjustmentUndefined, "negative radicand in the beam adjustment");
        out[i] = 0.5 * (1.0 + std::sqrt(rad)) * nls[i];
    }
    return out;
}

Eigen::VectorXcd make_incoming(const BeamSpec& b, const GridND& grid, const MaterialStack& mat) {
    validate(b);
    const int M = grid.M;
    if (grid.geometry == Geometry::Cylindrical && b.tiltAngle != 0.0)
        throw Error(ErrorCode::UnsupportedTilt, "tilted beams break the axial symmetry");
    Eigen::VectorXcd v(M);
    if (b.kind == BeamKind::Custom) {
        if (static_cast<int>(b.samples.size()) != M)
            throw Error(ErrorCode::InvalidConfig, "custom beam needs one sample per transverse cell");
        for (int m = 0; m < M; ++m) v[m] = b.samples[m];
    } else {
        for (int m = 0; m < M; ++m) v[m] = beam_shape(b, grid.geometry == Geometry::OneD ? b.center : grid.x(m));
    }
    if (b.adjust) {
        if (mat.layers.empty()) throw Error(ErrorCode::InvalidMaterial, "empty material stack");
        const Layer& L = b.side == Side::Left ? mat.layers.front() : mat.layers.back();
        v = adjust_for_nls(v, L.nu, L.eps, mat.sigma);
    }
    if (b.tiltAngle != 0.0) {
        const double kx = mat.k0 * std::sin(b.tiltAngle);
        for (int m = 0; m < M; ++m) v[m] *= std::exp(cd(0.0, kx * (grid.x(m) - b.center)));
    }
    return v;
}

cd soliton_profile(double k0, double eps, double r0, double x, double z) {
    if (!(eps > 0.0) || !(r0 > 0.0) || !(k0 > 0.0)) throw Error(ErrorCode::InvalidConfig, "soliton needs eps, r0, k0 > 0");
    const double f = 1.0 / (k0 * r0);
    const double amp = std::sqrt(2.0) / (k0 * r0 * std::sqrt(eps));
    return amp / std::cosh(x / r0) * std::exp(cd(0.0, k0 * z * (1.0 + 0.5 * f * f)));
}

// ---------------------------------------------------------------- flux

namespace {

// Derivative of f[a..b] at every node of the segment. An interface node shared by two
// segments keeps the higher-order estimate and averages equal-order ones.
void segment_derivative(const std::vector<cd>& f, int a, int b, double h, std::vector<cd>& d, std::vector<int>& hits,
                        std::vector<int>& order) {
    const int len = b - a + 1;
    const int ord = len >= 5 ? 4 : 2;
    auto put = [&](int i, cd v) {
        if (ord > order[i]) {
            d[i] = 0.0;
            hits[i] = 0;
            order[i] = ord;
        }
        if (ord < order[i]) return;
        d[i] += v;
        ++hits[i];
    };
    if (len >= 5) {
        const auto& c4 = central(1, 4);
        const auto& s0 = one_sided_first_derivative_5node(0);
        const auto& s1 = one_sided_first_derivative_5node(1);
        std::span<const cd> fs(f.data(), f.size());
        std::vector<cd> rev(f.rbegin(), f.rend());
        std::span<const cd> rs(rev.data(), rev.size());
        const int last = static_cast<int>(f.size()) - 1;
        put(a, apply_stencil(fs, s0, a, h));
        put(a + 1, apply_stencil(fs, s1, a + 1, h));
        for (int i = a + 2; i <= b - 2; ++i) put(i, apply_stencil(fs, c4, i, h));
        put(b - 1, -apply_stencil(rs, s1, last - (b - 1), h));
        put(b, -apply_stencil(rs, s0, last - b, h));
    } else {
        put(a, (-3.0 * f[a] + 4.0 * f[a + 1] - f[a + 2]) / (2.0 * h));
        for (int i = a + 1; i < b; ++i) put(i, (f[i + 1] - f[i - 1]) / (2.0 * h));
        put(b, (3.0 * f[b] - 4.0 * f[b - 1] + f[b - 2]) / (2.0 * h));
    }
}

}  // namespace

FluxProfile poynting_flux(const ComplexField2D& E, const GridND& grid, const MaterialStack& mat) {
    const int N = grid.N(), M = grid.M, L = N + 7;
    const double h = grid.hz();
    const NodeTable nodes = classify_nodes(grid, mat);
    std::vector<int> cuts{-3};
    for (int n = 0; n <= N; ++n)
        if (nodes.at(n) == NodeClass::Interface) cuts.push_back(n);
    cuts.push_back(N + 3);

    FluxProfile out;
    out.N = N;
    out.M = M;
    out.Sz.assign(static_cast<size_t>(L) * M, 0.0);
    out.power.assign(L, 0.0);
    std::vector<cd> col(L), d(L);
    std::vector<int> hits(L), order(L);
    for (int m = 0; m < M; ++m) {
        for (int n = -3; n <= N + 3; ++n) col[n + 3] = E(n, m);
        std::fill(d.begin(), d.end(), cd(0.0));
        std::fill(hits.begin(), hits.end(), 0);
        std::fill(order.begin(), order.end(), 0);
        for (size_t s = 0; s + 1 < cuts.size(); ++s) segment_derivative(col, cuts[s] + 3, cuts[s + 1] + 3, h, d, hits, order);
        for (int i = 0; i < L; ++i) {
            const cd ez = d[i] / static_cast<double>(hits[i]);
            out.Sz[static_cast<size_t>(i) * M + m] = std::imag(std::conj(col[i]) * ez) / mat.k0;
        }
    }
    for (int i = 0; i < L; ++i) {
        double s = 0.0;
        for (int m = 0; m < M; ++m) {
            const double w = grid.geometry == Geometry::Cartesian     ? grid.hp
                             : grid.geometry == Geometry::Cylindrical ? grid.x(m) * grid.hp
                                                                      : 1.0;
            s += w * out.Sz[static_cast<size_t>(i) * M + m];
        }
        out.power[i] = s;
    }
    return out;
}

double power_deviation(const FluxProfile& f) {
    const double ref = f.powerAt(f.N / 2);
    double dev = 0.0;
    for (int n = 0; n <= f.N; ++n) dev = std::max(dev, std::abs(f.powerAt(n) - ref));
    return dev / std::abs(ref);
}

Eigen::VectorXcd forward_component(const ComplexField2D& E, const GridND& grid, const MaterialStack& mat, int n) {
    const int N = grid.N();
    if (n < 0 || n + 4 > N + 3) throw Error(ErrorCode::InvalidConfig, "forward_component needs 0 <= n <= N - 1");
    const NodeTable nodes = classify_nodes(grid, mat);
    const MaterialSample s = sample_material(mat, nodes, n, Side::Right);
    const auto& st = one_sided_first_derivative_5node(0);
    Eigen::VectorXcd out(grid.M);
    std::vector<cd> col(5);
    for (int m = 0; m < grid.M; ++m) {
        for (int j = 0; j < 5; ++j) col[j] = E(n + j, m);
        const cd ez = apply_stencil(std::span<const cd>(col.data(), col.size()), st, 0, grid.hz());
        const double k = mat.k0 * std::sqrt(s.nu * s.nu + s.eps * std::pow(std::abs(E(n, m)), 2.0 * mat.sigma));
        out[m] = 0.5 * (E(n, m) + ez / cd(0.0, k));
    }
    return out;
}

// ---------------------------------------------------------------- spectrum

Spectrum oscillation_spectrum(const std::vector<double>& samples, double h) {
    const int n = static_cast<int>(samples.size());
    if (n < 64) throw Error(ErrorCode::InvalidConfig, "spectrum needs at least 64 samples");
    // least-squares line removal, then a Hann window
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += i;
        sy += samples[i];
        sxx += double(i) * i;
        sxy += i * samples[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    std::vector<double> x(n);
    double scale = 0.0, mag = 0.0;
    for (int i = 0; i < n; ++i) {
        x[i] = samples[i] - (icpt + slope * i);
        scale = std::max(scale, std::abs(samples[i]));
        mag = std::max(mag, std::abs(x[i]));
        x[i] *= 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
    }
    Spectrum s;
    if (mag <= 1e-10 * std::max(scale, 1e-300)) {
        s.noPeak = true;
        return s;
    }
    const int K = n / 2;
    std::vector<double> P(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) {
        cd acc = 0.0;
        const double w = -2.0 * std::numbers::pi * k / n;
        for (int i = 0; i < n; ++i) acc += x[i] * std::exp(cd(0.0, w * i));
        P[k] = std::abs(acc);
    }
    // the window leaks DC into bin 1; start the search at bin 2
    int kmax = 2;
    for (int k = 2; k <= K; ++k)
        if (P[k] > P[kmax]) kmax = k;
    double shift = 0.0;
    if (kmax > 1 && kmax < K) {
        const double a = P[kmax - 1], b = P[kmax], c = P[kmax + 1];
        const double den = a - 2.0 * b + c;
        if (den != 0.0) shift = 0.5 * (a - c) / den;
    }
    s.frequency = 2.0 * std::numbers::pi * (kmax + shift) / (n * h);
    s.amplitude = P[kmax];
    return s;
}

// ---------------------------------------------------------------- NLS

double second_moment(const GridND& grid, const Eigen::VectorXcd& phi) {
    double num = 0.0, den = 0.0;
    for (int m = 0; m < grid.M; ++m) {
        const double x = grid.x(m), a = std::norm(phi[m]);
        const double w = grid.geometry == Geometry::Cylindrical ? x : 1.0;
        num += w * x * x * a;
        den += w * a;
    }
    return den > 0.0 ? num / den : 0.0;
}

namespace {

struct Tridiag {
    std::vector<double> lo, di, up;
};

// Transverse Laplacian on cell centres with zero data on the outer faces.
Tridiag transverse_laplacian(const GridND& g) {
    const int M = g.M;
    const double h = g.hp, h2 = h * h;
    Tridiag t{std::vector<double>(M - 1), std::vector<double>(M), std::vector<double>(M - 1)};
    for (int m = 0; m < M; ++m) {
        double wl, wr;
        if (g.geometry == Geometry::Cylindrical) {
            const double r = g.x(m);
            wl = (r - 0.5 * h) / (r * h2);
            wr = (r + 0.5 * h) / (r * h2);
        } else {
            wl = wr = 1.0 / h2;
        }
        t.di[m] = -wl - wr;
        if (m > 0) t.lo[m - 1] = wl;
        if (m + 1 < M) t.up[m] = wr;
        if (m + 1 == M) t.di[m] -= wr;  // odd reflection across the outer face
        if (m == 0 && g.geometry == Geometry::Cartesian) t.di[m] -= wl;
    }
    return t;
}

Eigen::VectorXcd cn_step(const Tridiag& L, const Eigen::VectorXd& V, const Eigen::VectorXcd& phi, double k0,
                         double dz) {
    const int M = static_cast<int>(phi.size());
    const cd a(0.0, 2.0 * k0 / dz);
    std::vector<cd> lo(M - 1), di(M), up(M - 1), rhs(M);
    for (int m = 0; m < M; ++m) {
        cd lphi = L.di[m] * phi[m];
        if (m > 0) lphi += L.lo[m - 1] * phi[m - 1];
        if (m + 1 < M) lphi += L.up[m] * phi[m + 1];
        rhs[m] = a * phi[m] - 0.5 * (lphi + V[m] * phi[m]);
        di[m] = a + 0.5 * (L.di[m] + V[m]);
        if (m > 0) lo[m - 1] = 0.5 * L.lo[m - 1];
        if (m + 1 < M) up[m] = 0.5 * L.up[m];
    }
    if (!tridiagonal_solve(lo, di, up, rhs)) throw Error(ErrorCode::SingularMatrix, "singular NLS step");
    return Eigen::Map<Eigen::VectorXcd>(rhs.data(), M);
}

Eigen::VectorXd potential(const Eigen::VectorXcd& phi, double c, double sigma) {
    Eigen::VectorXd v(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) v[i] = c * std::pow(std::norm(phi[i]), sigma);
    return v;
}

int axis_cell(const GridND& g) { return g.geometry == Geometry::Cartesian ? g.M / 2 : 0; }

}  // namespace

NlsResult nls_march(const GridND& grid, const Eigen::VectorXcd& phi0, const NlsConfig& cfg) {
    if (grid.geometry == Geometry::OneD || grid.M < 3)
        throw Error(ErrorCode::InvalidConfig, "NLS march needs a transverse grid");
    if (phi0.size() != grid.M) throw Error(ErrorCode::InvalidConfig, "initial profile size mismatch");
    if (!(cfg.dz > 0.0) || !(cfg.zEnd > 0.0)) throw Error(ErrorCode::InvalidConfig, "dz and zEnd must be positive");
    const Tridiag L = transverse_laplacian(grid);
    const double c = cfg.k0 * cfg.k0 * cfg.eps;
    const double peak0 = phi0.cwiseAbs().maxCoeff();
    const int ax = axis_cell(grid);

    NlsResult r;
    Eigen::VectorXcd phi = phi0;
    auto record = [&](double z) {
        r.z.push_back(z);
        r.peak.push_back(phi.cwiseAbs().maxCoeff());
        r.onAxis.push_back(std::abs(phi[ax]));
        r.secondMoment.push_back(second_moment(grid, phi));
    };
    record(0.0);
    double z = 0.0, dz = cfg.dz;
    int halvings = 0, step = 0;
    while (z < cfg.zEnd - 1e-12 * cfg.zEnd) {
        const double h = std::min(dz, cfg.zEnd - z);
        const Eigen::VectorXd V0 = potential(phi, c, cfg.sigma);
        const Eigen::VectorXcd pred = cn_step(L, V0, phi, cfg.k0, h);
        const Eigen::VectorXd V = 0.5 * (V0 + potential(pred, c, cfg.sigma));
        const Eigen::VectorXcd next = cn_step(L, V, phi, cfg.k0, h);
        const double change = (next - pred).cwiseAbs().maxCoeff();
        const double size = phi.cwiseAbs().maxCoeff();
        if (!next.allFinite() || change > 0.05 * size) {
            if (++halvings > cfg.maxHalvings) {
                r.blowUp = true;
                r.zStar = z;
                break;
            }
            dz *= 0.5;
            continue;
        }
        phi = next;
        z += h;
        ++step;
        if (step % cfg.recordEvery == 0) record(z);
        if (phi.cwiseAbs().maxCoeff() > cfg.blowUpFactor * peak0) {
            r.blowUp = true;
            r.zStar = z;
            break;
        }
    }
    if (!r.blowUp) r.zStar = z;
    if (r.z.back() != z) record(z);
    r.last = phi;
    return r;
}

double critical_power_ratio(double eps, double k0, const BeamSpec& b, Geometry g, double sigma) {
    if (b.kind != BeamKind::Gaussian) throw Error(ErrorCode::UnsupportedProfile, "critical power needs a Gaussian beam");
    const double A2 = b.amplitude * b.amplitude, w = b.width;
    if (g == Geometry::Cylindrical && sigma == 1.0) {
        // P0 = int rho A^2 exp(-2 rho^2 / w^2) drho = A^2 w^2 / 4, Pc = 1.8623 / (eps k0^2)
        return eps * k0 * k0 * A2 * w * w / (4.0 * kTownesPower);
    }
    if (g == Geometry::Cartesian && sigma == 2.0) {
        // P0 = A^2 w sqrt(pi/2); Pc = sqrt3 pi / (2 k0 sqrt eps) from R = 3^(1/4) sech^(1/2)(2x)
        const double P0 = A2 * w * std::sqrt(std::numbers::pi / 2.0);
        const double Pc = std::sqrt(3.0) * std::numbers::pi / (2.0 * k0 * std::sqrt(eps));
        return P0 / Pc;
    }
    throw Error(ErrorCode::UnsupportedProfile, "critical power is defined for cylindrical cubic and Cartesian quintic only");
}

// ---------------------------------------------------------------- convergence

Eigen::VectorXcd restrict_to_coarse(const GridND& fine, const Eigen::VectorXcd& f) {
    const int M = fine.M;
    if (fine.geometry == Geometry::OneD) return f;
    if (M % 2 != 0 || M < 8) throw Error(ErrorCode::NonNestedGrids, "fine transverse grid must be even");
    const int Mc = M / 2;
    Eigen::VectorXcd c(Mc);
    for (int j = 0; j < Mc; ++j) {
        const int a = 2 * j;
        if (j == 0 && fine.geometry == Geometry::Cylindrical)
            c[j] = (8.0 * f[0] + 9.0 * f[1] - f[2]) / 16.0;
        else if (j == 0)
            c[j] = (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0;
        else if (j == Mc - 1)
            c[j] = (5.0 * f[M - 1] + 15.0 * f[M - 2] - 5.0 * f[M - 3] + f[M - 4]) / 16.0;
        else
            c[j] = (-f[a - 1] + 9.0 * f[a] + 9.0 * f[a + 1] - f[a + 2]) / 16.0;
    }
    return c;
}

std::vector<ConvergenceRow> grid_convergence_study(const std::vector<GridND>& grids,
                                                   const std::vector<ComplexField2D>& fields) {
    if (grids.size() != fields.size() || grids.size() < 2)
        throw Error(ErrorCode::InvalidConfig, "convergence study needs at least two levels");
    std::vector<ConvergenceRow> rows;
    for (size_t l = 0; l + 1 < grids.size(); ++l) {
        const GridND &gc = grids[l], &gf = grids[l + 1];
        const bool nested = gc.geometry == gf.geometry && std::abs(gc.z.Zmax - gf.z.Zmax) <= 1e-12 * gc.z.Zmax &&
                            std::abs(gc.Xmax - gf.Xmax) <= 1e-12 * std::max(1.0, gc.Xmax) && gf.N() == 2 * gc.N() &&
                            (gc.geometry == Geometry::OneD ? gf.M == 1 && gc.M == 1 : gf.M == 2 * gc.M);
        if (!nested) throw Error(ErrorCode::NonNestedGrids, "levels must differ by an exact factor of two");
        const ComplexField2D &Ec = fields[l], &Ef = fields[l + 1];
        double d = 0.0;
        for (int n = 0; n <= gc.N(); ++n) {
            Eigen::VectorXcd col(gf.M);
            for (int m = 0; m < gf.M; ++m) col[m] = Ef(2 * n, m);
            const Eigen::VectorXcd r = restrict_to_coarse(gf, col);
            for (int m = 0; m < gc.M; ++m) d = std::max(d, std::abs(Ec(n, m) - r[m]));
        }
        ConvergenceRow row;
        row.hz = gc.hz();
        row.hp = gc.hp;
        row.diff = d;
        row.log2diff = std::log2(d);
        if (!rows.empty()) row.rate = rows.back().log2diff - row.log2diff;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace nlh
