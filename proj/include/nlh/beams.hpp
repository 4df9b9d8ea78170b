#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nlh/field.hpp"
#include "nlh/grid.hpp"

namespace nlh {

enum class BeamKind { Sech, Gaussian, Custom };

struct BeamSpec {
    BeamKind kind = BeamKind::Gaussian;
    double width = 1.0;        // r0 for sech, w for exp(-(x/w)^2)
    double amplitude = 1.0;
    std::vector<cd> samples;   // Custom: one value per transverse cell
    double center = 0.0;
    double tiltAngle = 0.0;    // x-component of the propagation direction is sin(tiltAngle)
    Side side = Side::Left;
    bool adjust = false;
};

void validate(const BeamSpec& b);

std::string beam_kind_name(BeamKind k);
BeamKind parse_beam_kind(const std::string& s);

/// Untilted, unadjusted profile at transverse coordinate x.
cd beam_shape(const BeamSpec& b, double x);

/// Transverse incoming profile. The adjustment uses the layer adjacent to the beam's side.
Eigen::VectorXcd make_incoming(const BeamSpec& b, const GridND& grid, const MaterialStack& mat);

/// Pointwise (1 + sqrt(nu^2 + eps |E|^(2 sigma))) / 2 * E.
Eigen::VectorXcd adjust_for_nls(const Eigen::VectorXcd& nls, double nu, double eps, double sigma);

/// Cubic 1D NLS soliton (sqrt2 / (k0 r0 sqrt eps)) sech(x/r0) exp(i k0 z (1 + (k0 r0)^-2 / 2)).
cd soliton_profile(double k0, double eps, double r0, double x, double z = 0.0);

struct FluxProfile {
    int N = 0;
    int M = 0;
    std::vector<double> Sz;     // (N+7) x M, n-major like the field
    std::vector<double> power;  // one value per slice n = -3..N+3

    double sz(int n, int m) const { return Sz[static_cast<size_t>(n + 3) * M + m]; }
    double powerAt(int n) const { return power[n + 3]; }
};

/// S_z = Im(conj(E) E_z) / k0 with E_z differentiated inside each smooth region only.
FluxProfile poynting_flux(const ComplexField2D& E, const GridND& grid, const MaterialStack& mat);

/// max over slab slices of |N(z) - N(z_mid)| / |N(z_mid)|.
double power_deviation(const FluxProfile& f);

/// Right-going part (E + E_z / (i k)) / 2 of slice n, k = k0 sqrt(nu^2 + eps |E|^(2 sigma)) on the
/// slab side. E_z is one-sided into the layer to the right of n.
Eigen::VectorXcd forward_component(const ComplexField2D& E, const GridND& grid, const MaterialStack& mat, int n);

struct Spectrum {
    bool noPeak = false;
    double frequency = 0.0;  // angular spatial frequency
    double amplitude = 0.0;
};

/// Dominant non-DC frequency of a uniformly sampled signal (needs >= 64 samples).
Spectrum oscillation_spectrum(const std::vector<double>& samples, double h);

struct NlsConfig {
    double k0 = 1.0;
    double eps = 0.0;
    double sigma = 1.0;
    double dz = 0.01;
    double zEnd = 1.0;
    double blowUpFactor = 20.0;
    int maxHalvings = 10;
    int recordEvery = 1;
};

struct NlsResult {
    bool blowUp = false;
    double zStar = 0.0;         // blow-up location or the final z
    std::vector<double> z;      // recorded stations
    std::vector<double> peak;   // max |phi| at each station
    std::vector<double> onAxis; // |phi| at the axis (cylindrical) or the centre cell
    std::vector<double> secondMoment;
    Eigen::VectorXcd last;
};

/// Crank-Nicolson march of 2 i k0 phi_z + Lap_perp phi + k0^2 eps |phi|^(2 sigma) phi = 0.
/// Transverse grid from `grid` (cell centred), zero Dirichlet data at the outer edges.
NlsResult nls_march(const GridND& grid, const Eigen::VectorXcd& phi0, const NlsConfig& cfg);

/// Second moment <x^2> (Cartesian) or <rho^2> (cylindrical) of |phi|^2.
double second_moment(const GridND& grid, const Eigen::VectorXcd& phi);

/// P0 / Pc for an amplitude-A Gaussian of width w: cylindrical cubic and Cartesian quintic.
double critical_power_ratio(double eps, double k0, const BeamSpec& b, Geometry g, double sigma);

struct ConvergenceRow {
    double hz = 0.0;
    double hp = 0.0;
    double diff = 0.0;
    double log2diff = 0.0;
    std::optional<double> rate;  // log2 of the previous diff over this one
};

/// Successive ||E^(2h) - E^(h)||_inf on coincident z nodes of the slab, with the fine field
/// interpolated to coarse cell centres. Levels must be ordered coarse to fine.
std::vector<ConvergenceRow> grid_convergence_study(const std::vector<GridND>& grids,
                                                   const std::vector<ComplexField2D>& fields);

/// Fine column interpolated to the centres of the coarse cells (M/2 values).
Eigen::VectorXcd restrict_to_coarse(const GridND& fine, const Eigen::VectorXcd& column);

}  // namespace nlh
