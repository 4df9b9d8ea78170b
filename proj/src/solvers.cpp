#include "nlh/solvers.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "nlh/errors.hpp"
#include "nlh/sparse_lu.hpp"

namespace nlh {

std::string solver_name(SolverKind k) {
    switch (k) {
        case SolverKind::Newton: return "newton";
        case SolverKind::Freezing: return "freezing";
        case SolverKind::Born: return "born";
    }
    return "?";
}

SolverKind parse_solver(const std::string& s) {
    if (s == "newton") return SolverKind::Newton;
    if (s == "freezing") return SolverKind::Freezing;
    if (s == "born") return SolverKind::Born;
    throw Error(ErrorCode::InvalidConfig, "unknown solver '" + s + "'");
}

std::string divergence_name(DivergenceReason r) {
    switch (r) {
        case DivergenceReason::MaxIter: return "MaxIter";
        case DivergenceReason::NaN: return "NaN";
        case DivergenceReason::LinearSolveFail: return "LinearSolveFail";
        case DivergenceReason::Growth: return "Growth";
    }
    return "?";
}

void validate(const SolverConfig& c) {
    if (!(c.omega > 0.0 && c.omega <= 1.0)) throw Error(ErrorCode::InvalidConfig, "omega must be in (0, 1]");
    if (!(c.switchThreshold > 0.0)) throw Error(ErrorCode::InvalidConfig, "switchThreshold must be positive");
    if (!(c.convergenceTol > 0.0)) throw Error(ErrorCode::InvalidConfig, "convergenceTol must be positive");
    if (c.maxIterations < 1) throw Error(ErrorCode::InvalidConfig, "maxIterations must be >= 1");
    if (c.innerIterations < 1) throw Error(ErrorCode::InvalidConfig, "innerIterations must be >= 1");
}

namespace {

bool finite(const Eigen::VectorXcd& v) { return v.allFinite(); }

double inf_norm(const Eigen::VectorXcd& v) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max({m, std::abs(v[i].real()), std::abs(v[i].imag())});
    return m;
}

Eigen::VectorXcd initial(const Problem& p, const SolverConfig& cfg, const ComplexField2D* guess) {
    if (cfg.initialGuess == InitialGuess::GivenField) {
        if (!guess || static_cast<Eigen::Index>(guess->size()) != p.unknowns())
            throw Error(ErrorCode::InvalidConfig, "initial field missing or of wrong size");
        return guess->vec();
    }
    return Eigen::VectorXcd::Zero(p.unknowns());
}

SolveResult finish(const Problem& p, const Eigen::VectorXcd& E, SolveReport rep,
                   std::chrono::steady_clock::time_point t0) {
    ComplexField2D f(p.grid.N(), p.grid.M);
    f.vec() = E;
    rep.iterations = static_cast<int>(rep.history.size());
    rep.maxAmplitude = f.maxAbs();
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(f), std::move(rep)};
}

void trace(const SolverConfig& cfg, const SolveReport& r) {
    if (!cfg.verbose) return;
    const auto& h = r.history.back();
    std::cerr << r.solver << " it " << r.history.size() << " |dE| " << h.stepNorm << " |F| " << h.residualNorm
              << "\n";
}

}  // namespace

SolveResult newton_solve(const Problem& p, const SolverConfig& cfg, const ComplexField2D* guess) {
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    rep.solver = "newton";
    Eigen::VectorXcd E = initial(p, cfg, guess);
    JacobianAssembler jac(p.form);
    SparseLU<double> lu;
    bool relaxed = true;
    for (int it = 0; it < cfg.maxIterations; ++it) {
        const Eigen::VectorXcd F = residual_form(p, E);
        const double fn = inf_norm(F);
        if (!std::isfinite(fn)) {
            rep.divergenceReason = DivergenceReason::NaN;
            break;
        }
        Eigen::VectorXd dx;
        try {
            lu.factorize(jac.fill(E));
            dx = -lu.solve(to_real_split(F));
        } catch (const Error&) {
            rep.divergenceReason = DivergenceReason::LinearSolveFail;
            break;
        }
        const double dn = dx.lpNorm<Eigen::Infinity>();
        rep.history.push_back({dn, fn});
        trace(cfg, rep);
        if (!std::isfinite(dn)) {
            rep.divergenceReason = DivergenceReason::NaN;
            break;
        }
        if (dn > cfg.growthLimit) {
            rep.divergenceReason = DivergenceReason::Growth;
            break;
        }
        if (relaxed && dn < cfg.switchThreshold) relaxed = false;
        const double scale = relaxed ? cfg.omega / std::max(1.0, dn) : 1.0;
        E += scale * from_real_split(dx);
        if (dn < cfg.convergenceTol) {
            rep.converged = true;
            break;
        }
    }
    if (!rep.converged && !rep.divergenceReason) rep.divergenceReason = DivergenceReason::MaxIter;
    return finish(p, E, std::move(rep), t0);
}

SolveResult freezing_solve(const Problem& p, const SolverConfig& cfg, const ComplexField2D* guess) {
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    rep.solver = "freezing";
    Eigen::VectorXcd E = initial(p, cfg, guess);
    const double s = p.form.sigma;
    SparseLU<cd> lu;
    for (int it = 0; it < cfg.maxIterations; ++it) {
        Eigen::VectorXd w(E.size());
        for (Eigen::Index i = 0; i < E.size(); ++i) w[i] = std::pow(std::norm(E[i]), s);
        Eigen::SparseMatrix<cd> A = p.form.AE + p.form.AP * w.cast<cd>().asDiagonal();
        A.makeCompressed();
        const double fn = inf_norm(residual_form(p, E));
        Eigen::VectorXcd X;
        try {
            lu.factorize(A);
            X = lu.solve(p.form.b);
        } catch (const Error&) {
            rep.divergenceReason = DivergenceReason::LinearSolveFail;
            break;
        }
        const double dn = inf_norm(X - E);
        rep.history.push_back({dn, fn});
        trace(cfg, rep);
        if (!finite(X)) {
            rep.divergenceReason = DivergenceReason::NaN;
            break;
        }
        E = X;
        // a linear problem is solved exactly by the first frozen system
        if (dn < cfg.convergenceTol || p.form.AP.nonZeros() == 0) {
            rep.converged = true;
            break;
        }
        if (dn > cfg.growthLimit || inf_norm(E) > cfg.growthLimit) {
            rep.divergenceReason = DivergenceReason::Growth;
            break;
        }
    }
    if (!rep.converged && !rep.divergenceReason) rep.divergenceReason = DivergenceReason::MaxIter;
    return finish(p, E, std::move(rep), t0);
}

SeparableSolver::SeparableSolver(const Problem& p) : p_(p) {}

Eigen::VectorXcd SeparableSolver::solve(const Eigen::VectorXcd& rhs) const {
    const int N = p_.grid.N(), M = p_.grid.M, L = N + 7;
    const double h = p_.grid.hz(), k02 = p_.mat.k0 * p_.mat.k0;
    const double cz = (1.0 + k02 * h * h / 12.0) / (h * h);
    Eigen::Map<const Eigen::MatrixXcd> R(rhs.data(), M, L);  // column n+3 is the transverse slice
    Eigen::MatrixXcd U = p_.eig.PsiInv * R;
    for (int l = 0; l < M; ++l) {
        const cd q = p_.eig.q[l];
        const cd d0 = -2.0 * cz + k02 + p_.eig.Lambda[l];
        std::vector<cd> lo(L - 1, cz), up(L - 1, cz), di(L, d0), b(L);
        di.front() += cz * q;
        di.back() += cz * q;
        for (int n = 0; n < L; ++n) b[n] = U(l, n);
        if (!tridiagonal_solve(lo, di, up, b)) throw Error(ErrorCode::SingularMatrix, "singular mode system");
        for (int n = 0; n < L; ++n) U(l, n) = b[n];
    }
    Eigen::MatrixXcd X = p_.eig.Psi * U;
    return Eigen::Map<const Eigen::VectorXcd>(X.data(), X.size());
}

SolveResult born_solve(const Problem& p, const SolverConfig& cfg, const ComplexField2D* guess) {
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    rep.solver = "born";
    Eigen::VectorXcd E = initial(p, cfg, guess);
    const double s = p.form.sigma;
    const int M = p.grid.M;
    // interface rows are O(1/h) continuity conditions; rescale them to Laplacian size
    Eigen::VectorXd rowScale = Eigen::VectorXd::Ones(E.size());
    for (int n = 0; n <= p.grid.N(); ++n)
        if (p.nodes.at(n) == NodeClass::Interface)
            rowScale.segment(p.grid.index(n, 0), M).setConstant(11.0 / (6.0 * p.grid.hz()));
    SeparableSolver A0(p);
    for (int it = 0; it < cfg.maxIterations; ++it) {
        Eigen::VectorXd w(E.size());
        for (Eigen::Index i = 0; i < E.size(); ++i) w[i] = std::pow(std::norm(E[i]), s);
        const double fn = inf_norm(residual_form(p, E));
        Eigen::VectorXcd X = E;
        bool bad = false;
        try {
            for (int k = 0; k < cfg.innerIterations; ++k) {
                Eigen::VectorXcd r = p.form.AE * X - p.form.b;
                if (p.form.AP.nonZeros() > 0) r += p.form.AP * (w.cast<cd>().asDiagonal() * X);
                X -= A0.solve(rowScale.cast<cd>().asDiagonal() * r);
                if (!finite(X)) {
                    bad = true;
                    break;
                }
            }
        } catch (const Error&) {
            rep.divergenceReason = DivergenceReason::LinearSolveFail;
            break;
        }
        const double dn = bad ? NAN : inf_norm(X - E);
        rep.history.push_back({dn, fn});
        trace(cfg, rep);
        if (!std::isfinite(dn)) {
            rep.divergenceReason = DivergenceReason::NaN;
            break;
        }
        E = X;
        if (dn < cfg.convergenceTol) {
            rep.converged = true;
            break;
        }
        if (dn > cfg.growthLimit || inf_norm(E) > cfg.growthLimit) {
            rep.divergenceReason = DivergenceReason::Growth;
            break;
        }
    }
    if (!rep.converged && !rep.divergenceReason) rep.divergenceReason = DivergenceReason::MaxIter;
    return finish(p, E, std::move(rep), t0);
}

SolveResult solve(const Problem& p, const SolverConfig& cfg, const ComplexField2D* guess) {
    switch (cfg.kind) {
        case SolverKind::Newton: return newton_solve(p, cfg, guess);
        case SolverKind::Freezing: return freezing_solve(p, cfg, guess);
        case SolverKind::Born: return born_solve(p, cfg, guess);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown solver");
}

}  // namespace nlh
