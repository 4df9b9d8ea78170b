// Acceptance run: one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nlh/beams.hpp"
#include "nlh/config.hpp"
#include "nlh/driver.hpp"
#include "nlh/errors.hpp"
#include "nlh/helmholtz1d.hpp"
#include "nlh/helmholtz_nd.hpp"
#include "nlh/solvers.hpp"
#include "nlh/transverse.hpp"

using namespace nlh;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int prec = 4) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

double inf_norm(const Eigen::MatrixXcd& A) { return A.cwiseAbs().rowwise().sum().maxCoeff(); }

// Flux deviations of every converged nonlinear run, for the last criterion. The balance
// column adds the power that left through the transverse edges between z = 0 and each slice.
struct FluxRecord {
    std::string run;
    double deviation;
    double balance;
};
std::vector<FluxRecord> g_flux;

double outward_flux(const ComplexField2D& E, int n, int M, double hp, double k0, bool low) {
    // cubic extrapolation of the last four cells to the edge
    static constexpr double v[4] = {-5.0 / 16, 21.0 / 16, -35.0 / 16, 35.0 / 16};
    static constexpr double d[4] = {-23.0 / 24, 93.0 / 24, -141.0 / 24, 71.0 / 24};
    cd e = 0.0, de = 0.0;
    for (int j = 0; j < 4; ++j) {
        const cd f = low ? E(n, 3 - j) : E(n, M - 4 + j);
        e += v[j] * f;
        de += d[j] * f / hp;
    }
    return std::imag(std::conj(e) * de) / k0;
}

double balance_defect(const RunConfig& c, const ComplexField2D& E) {
    const Problem p = build_problem(c);
    const GridND& g = p.grid;
    const FluxProfile f = poynting_flux(E, g, p.mat);
    const int N = g.N();
    std::vector<double> out(N + 1, 0.0), bal(N + 1);
    for (int n = 0; n <= N; ++n) {
        if (g.geometry == Geometry::Cartesian)
            out[n] = outward_flux(E, n, g.M, g.hp, c.k0, false) + outward_flux(E, n, g.M, g.hp, c.k0, true);
        else if (g.geometry == Geometry::Cylindrical)
            out[n] = g.M * g.hp * outward_flux(E, n, g.M, g.hp, c.k0, false);
    }
    double lost = 0.0;
    for (int n = 0; n <= N; ++n) {
        if (n > 0) lost += 0.5 * (out[n] + out[n - 1]) * g.hz();
        bal[n] = f.powerAt(n) + lost;
    }
    double dev = 0.0;
    for (int n = 0; n <= N; ++n) dev = std::max(dev, std::abs(bal[n] - bal[N / 2]));
    return dev / std::abs(f.powerAt(N / 2));
}

void record_flux(const std::string& run, const RunOutcome& o, const RunConfig& c) {
    if (o.report.converged) g_flux.push_back({run, o.diagnostics.powerDeviation, balance_defect(c, o.field)});
}

bool g_paperGrid = false;

// ------------------------------------------------------------------ 1D

Outcome linear_oracle() {
    const double k0 = 4.0, Z = 5.0, lam = 2 * kPi / k0;
    const MaterialStack mat = homogeneous_slab(k0, 1.0, Z, 1.5, 0.0);
    const Incoming1D inc{1.0, 0.0};
    const TransferResult tm = transfer_matrix_linear(mat, inc);
    std::vector<double> err, h;
    double energy = 0.0;
    for (int r : {10, 20, 40}) {
        const int N = static_cast<int>(std::lround(Z / (lam / r)));
        const Grid1D g = build_grid_1d(Z, N);
        auto [E, rep] = solve_1d(g, mat, inc, SolverConfig{});
        double e = 0.0;
        for (int n = 0; n <= N; ++n) e = std::max(e, std::abs(E(n, 0) - tm.field(g.z(n))));
        err.push_back(e);
        h.push_back(g.h);
        const auto [R, T] = discrete_reflection_transmission(g, k0, inc, E.vec());
        energy = std::abs(std::norm(R) + std::norm(T) - 1.0);
    }
    const double r1 = std::log(err[0] / err[1]) / std::log(h[0] / h[1]);
    const double r2 = std::log(err[1] / err[2]) / std::log(h[1] / h[2]);
    const bool ok = r1 >= 3.5 && r1 <= 4.5 && r2 >= 3.5 && r2 <= 4.5 && energy <= 1e-8;
    return {ok, "rates " + num(r1) + ", " + num(r2) + "; ||R|^2+|T|^2-1| = " + num(energy, 3)};
}

Outcome single_interface() {
    // semi-infinite nu medium: the right boundary injects exactly what cancels the back reflection
    const double k0 = 4.0, nu = 1.5, Z = 5.0, lam = 2 * kPi / k0;
    const double T = 2.0 / (1.0 + nu);
    const MaterialStack mat = homogeneous_slab(k0, 1.0, Z, nu, 0.0);
    const Incoming1D inc{1.0, T * std::exp(cd(0.0, nu * k0 * Z)) * (1.0 - nu) / 2.0};
    const int N = static_cast<int>(std::lround(Z / (lam / 40)));
    auto [E, rep] = solve_1d(build_grid_1d(Z, N), mat, inc, SolverConfig{});
    const double dev0 = std::abs(std::abs(E(0, 0)) - T);
    double devAll = 0.0;
    for (int n = 0; n <= N; ++n) devAll = std::max(devAll, std::abs(std::abs(E(n, 0)) - T));
    return {dev0 <= 1e-6, "|E(0)| - 2/(1+nu) = " + num(dev0, 3) + ", max over slab " + num(devAll, 3)};
}

Outcome root_fidelity() {
    const double k0 = 4.0, h0 = 2 * kPi / k0 / 30.0;
    std::string d = "ratios";
    bool ok = true;
    double prev = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double h = h0 / std::pow(2.0, i);
        const double e = std::abs(characteristic_root(k0, h).q - std::exp(cd(0.0, k0 * h)));
        if (i > 0) {
            ok = ok && prev / e >= 28.0 && prev / e <= 36.0;
            d += " " + num(prev / e);
        }
        prev = e;
    }
    return {ok, d};
}

// ------------------------------------------------------------------ transverse and assembly

Outcome eigensystem() {
    const double k0 = 4.0, hz = 2 * kPi / k0 / 15.0;
    const int M = 64, N = 16;
    double worstEig = 0.0, worstAbc = 0.0;
    for (Geometry geo : {Geometry::Cartesian, Geometry::Cylindrical}) {
        const GridND g = build_grid_nd(geo, N * hz, N, geo == Geometry::Cartesian ? 6.0 : 3.0, M);
        const Eigen::MatrixXcd L = build_transverse_operator(g, k0);
        const TransverseEigensystem e = eigensolve_transverse(L, k0, hz);
        worstEig = std::max(worstEig, inf_norm(L * e.Psi - e.Psi * e.Lambda.asDiagonal()) / inf_norm(L));
        const MaterialStack mat = homogeneous_slab(k0, 1.0, N * hz, 1.0, 0.0);
        const Problem p = make_problem(g, mat, Eigen::VectorXcd::Zero(M), Eigen::VectorXcd::Zero(M));
        // each outgoing mode, alone, must leave both ABC rows satisfied
        for (int l = 0; l < M; ++l) {
            const Eigen::VectorXcd psi = p.eig.Psi.col(l);
            const cd q = p.eig.q[l];
            for (int dir : {-1, 1}) {
                ComplexField2D O(N, M);
                for (int n = -3; n <= N + 3; ++n)
                    for (int m = 0; m < M; ++m) O(n, m) = psi[m] * std::pow(q, dir > 0 ? n - N : -n);
                const Eigen::VectorXcd G = residual_form(p, O.vec());
                const int row = dir < 0 ? -3 : N + 3;
                double r = 0.0, s = 0.0;
                for (int m = 0; m < M; ++m) {
                    r = std::max(r, std::abs(G[g.index(row, m)]));
                    s = std::max(s, std::abs(O(row, m)));
                }
                worstAbc = std::max(worstAbc, r * hz * hz / s);
            }
        }
    }
    return {worstEig <= 1e-10 && worstAbc <= 1e-11,
            "eigen residual " + num(worstEig, 3) + ", ABC transparency " + num(worstAbc, 3)};
}

Outcome jacobian() {
    std::mt19937 rng(17);
    std::normal_distribution<double> d;
    const int N = 24, M = 16;
    double worst = 0.0;
    for (Geometry geo : {Geometry::Cartesian, Geometry::Cylindrical})
        for (double sigma : {1.0, 2.0}) {
            const GridND g = build_grid_nd(geo, 3.0, N, 3.0, M);
            MaterialStack mat;
            mat.k0 = 4.0;
            mat.sigma = sigma;
            mat.layers = {{0.0, 1.5, 1.2, 0.05}, {1.5, 3.0, 1.0, 0.1}};
            Eigen::VectorXcd inc(M);
            for (int m = 0; m < M; ++m) inc[m] = std::exp(-g.x(m) * g.x(m));
            const Problem p = make_problem(g, mat, inc, 0.3 * inc);
            ComplexField2D E(N, M);
            for (auto& v : E.values()) v = 0.5 * cd(d(rng), d(rng));
            const Eigen::SparseMatrix<double> J = assemble_jacobian(p, E);
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
            }
        }
    return {worst <= 1e-5, "worst relative mismatch " + num(worst, 3)};
}

// ------------------------------------------------------------------ beams

RunConfig desk_soliton(double Zmax) {
    RunConfig c = preset("soliton-2d-desk");
    const double lam = 2 * kPi / c.k0;
    c.Zmax = Zmax;
    c.N = static_cast<int>(std::lround(Zmax / (lam / 15)));
    c.layers = {{0.0, Zmax, 1.0, c.layers.front().eps}};
    return c;
}

Outcome soliton() {
    const RunConfig c = preset("soliton-2d-desk");
    const RunOutcome o = run_solve(c, false);
    record_flux(c.name, o, c);
    if (!o.report.converged) return {false, "Newton did not converge"};
    const Problem p = build_problem(c);
    const FluxProfile f = poynting_flux(o.field, p.grid, p.mat);
    const int ax = axis_cell(p.grid), N = p.grid.N();
    double lo = 1e300, hi = -1e300;
    for (int n = 1; n < N; ++n) {
        lo = std::min(lo, f.sz(n, ax));
        hi = std::max(hi, f.sz(n, ax));
    }
    const double variation = (hi - lo) / hi;
    const double freq = o.diagnostics.oscillationFrequency.value_or(0.0);
    const double off = std::abs(freq / (2.0 * c.k0) - 1.0);
    return {variation <= 0.05 && off <= 0.05,
            std::to_string(o.report.iterations) + " Newton steps; on-axis S_z variation " + num(100 * variation, 3) +
                "%; |E|^2 peak at " + num(freq) + " (2k0 = " + num(2 * c.k0) + ")"};
}

Outcome convergence() {
    RunConfig c = preset("soliton-2d-desk");
    c.Zmax = 20.0;
    c.Xmax = 8.0;
    c.layers = {{0.0, 20.0, 1.0, c.layers.front().eps}};
    c.N = 160;
    c.M = 64;
    const ConvergenceOutcome out = run_converge(c, 3, false);
    if (!out.allConverged) return {false, "a level did not converge"};
    std::string d = "diffs";
    for (const auto& r : out.rows) d += " " + num(r.diff, 3);
    const double rate = *out.rows.back().rate;
    return {rate >= 3.5, d + "; rate " + num(rate)};
}

Outcome collapse() {
    const RunConfig c = preset("collapse-cyl", g_paperGrid ? "paper" : "desk");
    const NlsComparison out = run_compare_nls(c, false);
    const RunOutcome& o = out.nlh;
    record_flux(c.name, o, c);
    const double p = critical_power_ratio(c.layers.front().eps, c.k0, *c.left, c.geometry, c.sigma);
    std::string d = c.name + ": ";
    if (!o.report.converged) return {false, d + "Newton did not converge"};
    const double kerr = o.diagnostics.kerrPeak, zs = o.diagnostics.focusZ, peak = o.diagnostics.maxAbs;
    bool ok = std::isfinite(peak) && out.nls.blowUp && out.nls.zStar < c.Zmax;
    if (g_paperGrid) {
        ok = ok && std::abs(peak / 5.5 - 1.0) <= 0.10 && std::abs(zs / 6.25 - 1.0) <= 0.05;
    } else {
        ok = ok && kerr >= 3.0 && kerr <= 6.0 && zs >= 5.0 && zs <= 7.5;
    }
    d += std::to_string(o.report.iterations) + " Newton steps; max|E| " + num(peak) + ", eps max|E|^2 " + num(kerr) +
         ", focus z " + num(zs) + "; NLS p = " + num(p) +
         (out.nls.blowUp ? ", blow-up at z = " + num(out.nls.zStar) : ", no blow-up");
    return {ok, d};
}

Outcome solver_ordering() {
    const std::vector<double> lengths{10, 20, 40, 60, 80, 160};
    std::string d;
    double best[3] = {0, 0, 0};
    const SolverKind kinds[3] = {SolverKind::Born, SolverKind::Freezing, SolverKind::Newton};
    for (int s = 0; s < 3; ++s) {
        for (double Z : lengths) {
            RunConfig c = desk_soliton(Z);
            c.solver.kind = kinds[s];
            const RunOutcome o = run_solve(c, false);
            if (!o.report.converged) break;
            if (kinds[s] == SolverKind::Newton) record_flux(c.name + " Zmax " + num(Z), o, c);
            best[s] = Z;
        }
        d += solver_name(kinds[s]) + " " + num(best[s]) + (s < 2 ? ", " : "");
    }
    const bool ok = best[0] <= best[1] && best[1] <= best[2] && (best[0] < best[1] || best[1] < best[2]);
    return {ok, "largest converged Zmax: " + d};
}

Outcome adjustment() {
    // The adjustment targets the refracted (right-going) part at z = 0+; the total field there also
    // carries whatever the slab sends back, so both are reported.
    RunConfig c = preset("unadjusted-cyl", g_paperGrid ? "paper" : "desk");
    const Setup s = build_setup(c);
    BeamSpec raw = *c.left;
    raw.adjust = false;
    const Eigen::VectorXd nls = make_incoming(raw, s.grid, s.mat).cwiseAbs();
    double fwd[2], total[2];
    for (int a = 0; a < 2; ++a) {
        c.left->adjust = a == 1;
        const RunOutcome o = run_solve(c, false);
        if (!o.report.converged) return {false, std::string(a ? "adjusted" : "unadjusted") + " run did not converge"};
        record_flux(c.name + (a ? " adjusted" : ""), o, c);
        const Eigen::VectorXd f = forward_component(o.field, s.grid, s.mat, 0).cwiseAbs();
        fwd[a] = total[a] = 0.0;
        for (int m = 0; m < s.grid.M; ++m) {
            fwd[a] = std::max(fwd[a], std::abs(f[m] - nls[m]));
            total[a] = std::max(total[a], std::abs(std::abs(o.field(0, m)) - nls[m]));
        }
    }
    return {fwd[1] < fwd[0] && total[1] < total[0], c.name + ": max distance to the NLS input, refracted part: unadjusted " + num(fwd[0]) +
                                 ", adjusted " + num(fwd[1]) + "; total |E(0+)|: " + num(total[0]) + ", " +
                                 num(total[1])};
}

Outcome flux_conservation() {
    // the desk soliton and the same slab with both steps halved
    RunConfig c = preset("soliton-2d-desk");
    double dev[2];
    for (int l = 0; l < 2; ++l) {
        const RunOutcome o = run_solve(c, false);
        if (!o.report.converged) return {false, "h-halving run did not converge"};
        if (l == 1) record_flux(c.name + " fine", o, c);
        dev[l] = o.diagnostics.powerDeviation;
        c.N *= 2;
        c.M *= 2;
    }
    double worst = 0.0, worstBalance = 0.0;
    std::string where;
    for (const auto& r : g_flux) {
        worstBalance = std::max(worstBalance, r.balance);
        if (r.deviation > worst) {
            worst = r.deviation;
            where = r.run;
        }
    }
    const double gain = dev[0] / dev[1];
    return {worst <= 0.01 && gain >= std::pow(2.0, 3.5) && gain <= std::pow(2.0, 4.5),
            std::to_string(g_flux.size()) + " converged runs, worst beam-power deviation " + num(100 * worst, 3) +
                "% (" + where + "); with the lateral outflow added back, worst " + num(100 * worstBalance, 3) +
                "%; halving gain " + num(gain) + "x"};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only, expectFail;
    std::string grid = "auto";
    app.add_option("--only", only, "run only these criteria");
    app.add_option("--expect-fail", expectFail, "criteria known to fail; reported, not counted");
    app.add_option("--scale", grid, "grids for the collapse and adjustment runs: paper, desk or auto (paper when memory allows)")
        ->check(CLI::IsMember({"paper", "desk", "auto"}));
    CLI11_PARSE(app, argc, argv);

    if (grid == "auto") {
        std::ifstream mi("/proc/meminfo");
        std::string line, key;
        long avail = 0;
        while (std::getline(mi, line)) {
            std::istringstream ls(line);
            if (ls >> key && key == "MemAvailable:") ls >> avail;
        }
        g_paperGrid = avail > 4L * 1024 * 1024;
    } else {
        g_paperGrid = grid == "paper";
    }
    std::cout << "collapse and adjustment grids: " << (g_paperGrid ? "paper" : "desk") << std::endl;

    const std::vector<Criterion> all{
        {1, "1D linear slab against the transfer-matrix oracle", linear_oracle},
        {2, "single-interface transmission 2/(1+nu)", single_interface},
        {3, "characteristic root fidelity", root_fidelity},
        {4, "transverse eigensystem and ABC transparency", eigensystem},
        {5, "Jacobian against finite differences", jacobian},
        {6, "desk nonparaxial soliton", soliton},
        {7, "desk grid convergence", convergence},
        {8, "arrest of collapse", collapse},
        {9, "solver ordering on a length sweep", solver_ordering},
        {10, "beam adjustment", adjustment},
        {11, "flux conservation", flux_conservation},
    };
    const std::set<int> pick(only.begin(), only.end()), xfail(expectFail.begin(), expectFail.end());
    int failures = 0;
    for (const auto& c : all) {
        if (!pick.empty() && !pick.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool expected = xfail.count(c.id) > 0;
        std::cout << "criterion " << c.id << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL")
                  << (!o.pass && expected ? " [expected]" : "") << " -- " << o.detail << " [" << num(sec, 3) << " s]"
                  << std::endl;
        if (!o.pass && !expected) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
