// Command-line driver: solve, preset, converge, compare-nls.
#include <CLI11.hpp>

#include <iostream>

#include "nlh/config.hpp"
#include "nlh/driver.hpp"
#include "nlh/errors.hpp"
#include "nlh/io.hpp"

namespace {

void summary(const nlh::RunOutcome& o) {
    const auto& r = o.report;
    std::cout << r.solver << ": " << (r.converged ? "converged" : "not converged") << " after " << r.iterations
              << " iterations (" << r.seconds << " s)";
    if (r.divergenceReason) std::cout << ", reason " << nlh::divergence_name(*r.divergenceReason);
    std::cout << "\nmax|E| = " << o.diagnostics.maxAbs << " at z = " << o.diagnostics.focusZ
              << ", power deviation = " << o.diagnostics.powerDeviation << "\n";
    std::cout << "outputs in " << o.dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear Helmholtz solver"};
    app.require_subcommand(1);

    std::string configPath;
    auto* solveCmd = app.add_subcommand("solve", "Solve the problem described by a JSON configuration");
    solveCmd->add_option("config", configPath, "configuration file")->required();

    std::string presetName, scale, outDir;
    bool dump = false;
    auto* presetCmd = app.add_subcommand("preset", "Run (or print) a named experiment preset");
    presetCmd->add_option("name", presetName, "preset name, e.g. soliton-2d or soliton-2d-desk");
    presetCmd->add_option("--scale", scale, "paper or desk")->check(CLI::IsMember({"paper", "desk"}));
    presetCmd->add_flag("--dump", dump, "print the configuration instead of running it");
    presetCmd->add_option("--output", outDir, "output directory");
    bool list = false;
    presetCmd->add_flag("--list", list, "list preset names");

    int levels = 3;
    auto* convCmd = app.add_subcommand("converge", "Grid convergence study by repeated doubling");
    convCmd->add_option("config", configPath, "configuration file (coarsest level)")->required();
    convCmd->add_option("--levels", levels, "number of grids")->check(CLI::Range(2, 8));

    auto* nlsCmd = app.add_subcommand("compare-nls", "Solve and march the paraxial model from the same beam");
    nlsCmd->add_option("config", configPath, "configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*solveCmd) {
            const auto out = nlh::run_solve(nlh::load_config(configPath));
            summary(out);
            return out.exitCode;
        }
        if (*presetCmd) {
            if (list || presetName.empty()) {
                for (const auto& n : nlh::preset_names()) std::cout << n << "\n";
                return 0;
            }
            nlh::RunConfig c = nlh::preset(presetName, scale);
            if (!outDir.empty()) c.output = outDir;
            if (dump) {
                std::cout << nlh::serialize_config(c);
                return 0;
            }
            const auto out = nlh::run_solve(c);
            summary(out);
            return out.exitCode;
        }
        if (*convCmd) {
            const auto out = nlh::run_converge(nlh::load_config(configPath), levels);
            std::cout << "hz, hp, ||E2h - Eh||, log2, rate\n";
            for (const auto& r : out.rows)
                std::cout << r.hz << ", " << r.hp << ", " << r.diff << ", " << r.log2diff << ", "
                          << (r.rate ? std::to_string(*r.rate) : std::string("-")) << "\n";
            return out.allConverged ? 0 : 2;
        }
        if (*nlsCmd) {
            const auto out = nlh::run_compare_nls(nlh::load_config(configPath));
            summary(out.nlh);
            std::cout << "NLS: " << (out.nls.blowUp ? "blow-up at z = " : "no blow-up, reached z = ") << out.nls.zStar
                      << "\n";
            return out.nlh.exitCode;
        }
    } catch (const nlh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
