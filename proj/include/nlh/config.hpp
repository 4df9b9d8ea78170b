#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlh/beams.hpp"
#include "nlh/grid.hpp"
#include "nlh/helmholtz_nd.hpp"
#include "nlh/solvers.hpp"

namespace nlh {

struct NlsOptions {
    double dz = 0.0;  // 0: use the NLH longitudinal step
    int M = 0;        // 0: four times the NLH transverse resolution
};

struct RunConfig {
    std::string name = "run";
    Geometry geometry = Geometry::Cartesian;
    double k0 = 1.0;
    double sigma = 1.0;
    double Zmax = 1.0;
    double Xmax = 1.0;  // Rmax for cylindrical, unused in 1d
    int N = 8;
    int M = 1;
    std::vector<Layer> layers;
    std::optional<BeamSpec> left;
    std::optional<BeamSpec> right;
    SolverConfig solver;
    NlsOptions nls;
    std::string output = "out";
    bool desk = false;
};

/// Parses JSON text; errors name the offending field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical JSON (sorted keys, every field present).
std::string serialize_config(const RunConfig& c);

/// Checks every module precondition up front.
void validate(const RunConfig& c);

std::vector<std::string> preset_names();
/// Accepts "<family>-paper", "<family>-desk", or a bare family with a scale ("paper" | "desk").
RunConfig preset(const std::string& name, const std::string& scale = "");

struct Setup {
    GridND grid;
    MaterialStack mat;
    Eigen::VectorXcd incL;
    Eigen::VectorXcd incR;
};

Setup build_setup(const RunConfig& c);
Problem build_problem(const RunConfig& c);

}  // namespace nlh
