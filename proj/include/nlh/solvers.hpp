#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlh/field.hpp"
#include "nlh/helmholtz_nd.hpp"

namespace nlh {

enum class SolverKind { Newton, Freezing, Born };
enum class InitialGuess { Zero, GivenField };
enum class DivergenceReason { MaxIter, NaN, LinearSolveFail, Growth };

std::string solver_name(SolverKind k);
SolverKind parse_solver(const std::string& s);
std::string divergence_name(DivergenceReason r);

struct SolverConfig {
    SolverKind kind = SolverKind::Newton;
    double omega = 0.5;
    double switchThreshold = 0.01;
    double convergenceTol = 1e-12;
    int maxIterations = 200;
    InitialGuess initialGuess = InitialGuess::Zero;
    int innerIterations = 5;     // Born inner sweeps per outer step
    double growthLimit = 1e8;    // abort when a step or the field exceeds this
    bool verbose = false;
};

void validate(const SolverConfig& c);

struct IterationRecord {
    double stepNorm = 0.0;
    double residualNorm = 0.0;
};

struct SolveReport {
    std::string solver;
    bool converged = false;
    int iterations = 0;
    std::vector<IterationRecord> history;
    double maxAmplitude = 0.0;
    std::optional<double> condEstimate;
    std::optional<DivergenceReason> divergenceReason;
    double seconds = 0.0;
};

using SolveResult = std::pair<ComplexField2D, SolveReport>;

SolveResult newton_solve(const Problem& p, const SolverConfig& cfg, const ComplexField2D* guess = nullptr);
SolveResult freezing_solve(const Problem& p, const SolverConfig& cfg, const ComplexField2D* guess = nullptr);
SolveResult born_solve(const Problem& p, const SolverConfig& cfg, const ComplexField2D* guess = nullptr);
SolveResult solve(const Problem& p, const SolverConfig& cfg, const ComplexField2D* guess = nullptr);

/// Solves the separable exterior-type operator with homogeneous two-way boundary rows.
class SeparableSolver {
public:
    explicit SeparableSolver(const Problem& p);
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

private:
    const Problem& p_;
};

}  // namespace nlh
