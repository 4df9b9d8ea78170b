#include "nlh/driver.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "nlh/errors.hpp"
#include "nlh/io.hpp"

namespace nlh {

namespace fs = std::filesystem;

int axis_cell(const GridND& g) { return g.geometry == Geometry::Cartesian ? g.M / 2 : 0; }

Diagnostics diagnose(const Problem& p, const ComplexField2D& E, const FluxProfile& flux) {
    Diagnostics d;
    const int N = p.grid.N(), M = p.grid.M;
    for (int n = 0; n <= N; ++n) {
        const MaterialSample s = sample_material(p.mat, p.nodes, n, n < N ? Side::Right : Side::Left);
        for (int m = 0; m < M; ++m) {
            const double a = std::abs(E(n, m));
            if (a > d.maxAbs) {
                d.maxAbs = a;
                d.focusZ = p.grid.z.z(n);
                d.focusX = p.grid.geometry == Geometry::OneD ? 0.0 : p.grid.x(m);
            }
            d.kerrPeak = std::max(d.kerrPeak, s.eps * std::pow(a, 2.0 * p.mat.sigma));
        }
    }
    d.powerDeviation = power_deviation(flux);
    if (N + 1 >= 64) {
        std::vector<double> s(N + 1);
        const int ax = axis_cell(p.grid);
        for (int n = 0; n <= N; ++n) s[n] = std::norm(E(n, ax));
        const Spectrum sp = oscillation_spectrum(s, p.grid.hz());
        if (!sp.noPeak) d.oscillationFrequency = sp.frequency;
    }
    return d;
}

int exit_code(const SolveReport& r) { return r.converged ? 0 : 2; }

std::string report_json(const RunConfig& c, const SolveReport& r, const Diagnostics& d) {
    nlohmann::json j;
    j["name"] = c.name;
    j["solver"] = r.solver;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["seconds"] = r.seconds;
    j["maxAmplitude"] = r.maxAmplitude;
    j["divergenceReason"] = r.divergenceReason ? nlohmann::json(divergence_name(*r.divergenceReason)) : nlohmann::json();
    nlohmann::json step = nlohmann::json::array(), res = nlohmann::json::array();
    for (const auto& h : r.history) {
        step.push_back(h.stepNorm);
        res.push_back(h.residualNorm);
    }
    j["history"] = {{"stepNorm", step}, {"residualNorm", res}};
    j["diagnostics"] = {{"maxAbs", d.maxAbs},
                        {"focusZ", d.focusZ},
                        {"focusX", d.focusX},
                        {"kerrPeak", d.kerrPeak},
                        {"powerDeviation", d.powerDeviation},
                        {"oscillationFrequency",
                         d.oscillationFrequency ? nlohmann::json(*d.oscillationFrequency) : nlohmann::json()}};
    return j.dump(2) + "\n";
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_outputs(const fs::path& dir, const RunConfig& c, const Problem& p, const ComplexField2D& E,
                   const SolveReport& r, const Diagnostics& d, const FluxProfile& flux) {
    FieldHeader h{p.grid.geometry, p.grid.N(), p.grid.M, p.grid.hz(), p.grid.hp, p.mat.k0};
    write_field(dir / "field.bin", h, E);
    write_atomic(dir / "config.json", serialize_config(c));
    write_atomic(dir / "report.json", report_json(c, r, d));
    const int ax = axis_cell(p.grid);
    std::ostringstream oa, fl;
    oa << "z,abs_E_sq,S_z,power\n";
    fl << "z,power,relative_deviation\n";
    const double ref = flux.powerAt(p.grid.N() / 2);
    for (int n = -3; n <= p.grid.N() + 3; ++n) {
        const double z = p.grid.z.z(n);
        oa << fmt(z) << ',' << fmt(std::norm(E(n, ax))) << ',' << fmt(flux.sz(n, ax)) << ',' << fmt(flux.powerAt(n))
           << '\n';
        fl << fmt(z) << ',' << fmt(flux.powerAt(n)) << ',' << fmt((flux.powerAt(n) - ref) / ref) << '\n';
    }
    write_atomic(dir / "on_axis.csv", oa.str());
    write_atomic(dir / "flux.csv", fl.str());
}

}  // namespace

RunOutcome run_solve(const RunConfig& c, bool write) {
    const Problem p = build_problem(c);
    auto [E, rep] = solve(p, c.solver);
    const FluxProfile flux = poynting_flux(E, p.grid, p.mat);
    RunOutcome out;
    out.diagnostics = diagnose(p, E, flux);
    out.report = std::move(rep);
    out.exitCode = exit_code(out.report);
    out.dir = resolve_output(c.output);
    if (write) write_outputs(out.dir, c, p, E, out.report, out.diagnostics, flux);
    out.field = std::move(E);
    return out;
}

ConvergenceOutcome run_converge(const RunConfig& c, int levels, bool write) {
    if (levels < 2) throw Error(ErrorCode::InvalidConfig, "field 'levels': need at least 2");
    ConvergenceOutcome out;
    std::vector<GridND> grids;
    std::vector<ComplexField2D> fields;
    for (int l = 0; l < levels; ++l) {
        RunConfig cl = c;
        cl.N = c.N << l;
        if (c.geometry != Geometry::OneD) cl.M = c.M << l;
        const Problem p = build_problem(cl);
        auto [E, rep] = solve(p, cl.solver);
        out.allConverged = out.allConverged && rep.converged;
        out.reports.push_back(rep);
        grids.push_back(p.grid);
        fields.push_back(std::move(E));
    }
    out.rows = grid_convergence_study(grids, fields);
    if (write) {
        std::ostringstream os;
        os << "hz,hp,diff,log2diff,rate\n";
        for (const auto& r : out.rows)
            os << fmt(r.hz) << ',' << fmt(r.hp) << ',' << fmt(r.diff) << ',' << fmt(r.log2diff) << ','
               << (r.rate ? fmt(*r.rate) : "") << '\n';
        write_atomic(resolve_output(c.output) / "convergence.csv", os.str());
    }
    return out;
}

NlsComparison run_compare_nls(const RunConfig& c, bool write) {
    if (!c.left) throw Error(ErrorCode::InvalidConfig, "field 'beams.left': NLS comparison needs a left beam");
    if (c.geometry == Geometry::OneD) throw Error(ErrorCode::InvalidConfig, "field 'geometry': NLS needs a transverse grid");
    NlsComparison out;
    out.nlh = run_solve(c, write);
    const int Mn = c.nls.M > 0 ? c.nls.M : 4 * c.M;
    // the march only uses the transverse grid; N just keeps the aspect ratio quiet
    const double hp = (c.geometry == Geometry::Cartesian ? 2.0 : 1.0) * c.Xmax / Mn;
    const GridND g = build_grid_nd(c.geometry, c.Zmax, std::max(4, int(std::lround(c.Zmax / hp))), c.Xmax, Mn);
    BeamSpec b = *c.left;
    b.adjust = false;
    MaterialStack mat;
    mat.k0 = c.k0;
    mat.sigma = c.sigma;
    mat.layers = c.layers;
    const Eigen::VectorXcd phi0 = make_incoming(b, g, mat);
    out.nlsInputPeak = phi0.cwiseAbs().maxCoeff();
    NlsConfig nc;
    nc.k0 = c.k0;
    nc.eps = c.layers.front().eps;
    nc.sigma = c.sigma;
    nc.dz = c.nls.dz > 0.0 ? c.nls.dz : c.Zmax / c.N;
    nc.zEnd = c.Zmax;
    out.nls = nls_march(g, phi0, nc);
    if (write) {
        std::ostringstream os;
        os << "z,nls_on_axis_abs_sq,nls_peak_abs\n";
        for (size_t i = 0; i < out.nls.z.size(); ++i)
            os << fmt(out.nls.z[i]) << ',' << fmt(out.nls.onAxis[i] * out.nls.onAxis[i]) << ','
               << fmt(out.nls.peak[i]) << '\n';
        const fs::path dir = resolve_output(c.output);
        write_atomic(dir / "nls.csv", os.str());
        nlohmann::json j = {{"blowUp", out.nls.blowUp}, {"zStar", out.nls.zStar}, {"inputPeak", out.nlsInputPeak}};
        write_atomic(dir / "nls.json", j.dump(2) + "\n");
    }
    return out;
}

}  // namespace nlh
