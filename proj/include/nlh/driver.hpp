#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlh/beams.hpp"
#include "nlh/config.hpp"
#include "nlh/solvers.hpp"

namespace nlh {

struct Diagnostics {
    double maxAbs = 0.0;
    double focusZ = 0.0;      // z of max |E| over the slab
    double focusX = 0.0;
    double kerrPeak = 0.0;    // max eps |E|^(2 sigma) over the slab
    double powerDeviation = 0.0;
    std::optional<double> oscillationFrequency;  // dominant frequency of on-axis |E|^2
};

/// Transverse cell used for on-axis output: the axis cell (cylindrical) or x = +h/2 (Cartesian).
int axis_cell(const GridND& g);

Diagnostics diagnose(const Problem& p, const ComplexField2D& E, const FluxProfile& flux);

/// 0 when converged, 2 otherwise.
int exit_code(const SolveReport& r);

std::string report_json(const RunConfig& c, const SolveReport& r, const Diagnostics& d);

struct RunOutcome {
    SolveReport report;
    Diagnostics diagnostics;
    ComplexField2D field;
    std::filesystem::path dir;
    int exitCode = 0;
};

/// Solves and, when `write` is set, emits field.bin/.json, report.json, on_axis.csv, flux.csv.
RunOutcome run_solve(const RunConfig& c, bool write = true);

struct ConvergenceOutcome {
    std::vector<ConvergenceRow> rows;
    std::vector<SolveReport> reports;
    bool allConverged = true;
};

/// Solves the config at `levels` grids (N, M doubled each time) and tabulates differences.
ConvergenceOutcome run_converge(const RunConfig& c, int levels, bool write = true);

struct NlsComparison {
    RunOutcome nlh;
    NlsResult nls;
    double nlsInputPeak = 0.0;
};

/// NLH solve plus the NLS march from the unadjusted left beam; writes nls.csv.
NlsComparison run_compare_nls(const RunConfig& c, bool write = true);

}  // namespace nlh
