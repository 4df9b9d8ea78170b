#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nlh {

struct StencilCoeffs {
    int derivative = 0;
    int accuracy = 0;
    std::vector<int> offsets;
    std::vector<double> weights;
    int scalePower = 0;  // weighted sum is divided by h^scalePower
};

/// Central operators D^(acc)_(d): (1,2) (2,2) (3,2) (4,2) (1,4) (2,4).
const StencilCoeffs& central(int derivative, int accuracy);

struct OneSidedFirstDerivative {
    StencilCoeffs coeffs;     // (-85, 108, -27, 4) / (66 h) on offsets 0..3
    double curvatureWeight;   // dE/dz = coeffs(E) - curvatureWeight * h * E''
};

const OneSidedFirstDerivative& one_sided_first_derivative_4node();

/// Continuity row (4, -27, 108, -170, 108, -27, 4) / (66 h) on offsets -3..3.
const StencilCoeffs& interface_7node();

/// Fourth-order one-sided first derivatives for the end nodes of a region:
/// offsets 0..4 at the first node and -1..3 at the second one.
const StencilCoeffs& one_sided_first_derivative_5node(int shift);

std::complex<double> apply_stencil(std::span<const std::complex<double>> f, const StencilCoeffs& c,
                                   int index, double h);
double apply_stencil(std::span<const double> f, const StencilCoeffs& c, int index, double h);

}  // namespace nlh
