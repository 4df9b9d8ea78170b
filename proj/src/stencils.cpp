#include "nlh/stencils.hpp"

#include <cmath>
#include <string>

#include "nlh/errors.hpp"

namespace nlh {

namespace {

StencilCoeffs rational(int d, int acc, std::vector<int> offsets, const std::vector<int>& num, int den,
                       int scale) {
    StencilCoeffs s;
    s.derivative = d;
    s.accuracy = acc;
    s.offsets = std::move(offsets);
    for (int w : num) s.weights.push_back(static_cast<double>(w) / den);
    s.scalePower = scale;
    return s;
}

template <class T>
T apply_impl(std::span<const T> f, const StencilCoeffs& c, int index, double h) {
    T acc{};
    for (size_t j = 0; j < c.offsets.size(); ++j) {
        long k = static_cast<long>(index) + c.offsets[j];
        if (k < 0 || k >= static_cast<long>(f.size()))
            throw Error(ErrorCode::StencilOutOfRange,
                        "offset " + std::to_string(c.offsets[j]) + " at index " + std::to_string(index));
        acc += c.weights[j] * f[k];
    }
    return acc / std::pow(h, c.scalePower);
}

}  // namespace

const StencilCoeffs& central(int d, int acc) {
    static const StencilCoeffs d1a2 = rational(1, 2, {-1, 0, 1}, {-1, 0, 1}, 2, 1);
    static const StencilCoeffs d2a2 = rational(2, 2, {-1, 0, 1}, {1, -2, 1}, 1, 2);
    static const StencilCoeffs d3a2 = rational(3, 2, {-2, -1, 0, 1, 2}, {-1, 2, 0, -2, 1}, 2, 3);
    static const StencilCoeffs d4a2 = rational(4, 2, {-2, -1, 0, 1, 2}, {1, -4, 6, -4, 1}, 1, 4);
    static const StencilCoeffs d1a4 = rational(1, 4, {-2, -1, 0, 1, 2}, {1, -8, 0, 8, -1}, 12, 1);
    static const StencilCoeffs d2a4 = rational(2, 4, {-2, -1, 0, 1, 2}, {-1, 16, -30, 16, -1}, 12, 2);
    if (acc == 2) {
        switch (d) {
            case 1: return d1a2;
            case 2: return d2a2;
            case 3: return d3a2;
            case 4: return d4a2;
        }
    } else if (acc == 4) {
        if (d == 1) return d1a4;
        if (d == 2) return d2a4;
    }
    throw Error(ErrorCode::UnsupportedStencil,
                "no central stencil for derivative " + std::to_string(d) + ", accuracy " + std::to_string(acc));
}

const OneSidedFirstDerivative& one_sided_first_derivative_4node() {
    static const OneSidedFirstDerivative s{rational(1, 4, {0, 1, 2, 3}, {-85, 108, -27, 4}, 66, 1), 3.0 / 11.0};
    return s;
}

const StencilCoeffs& interface_7node() {
    static const StencilCoeffs s =
        rational(1, 4, {-3, -2, -1, 0, 1, 2, 3}, {4, -27, 108, -170, 108, -27, 4}, 66, 1);
    return s;
}

const StencilCoeffs& one_sided_first_derivative_5node(int shift) {
    static const StencilCoeffs s0 = rational(1, 4, {0, 1, 2, 3, 4}, {-25, 48, -36, 16, -3}, 12, 1);
    static const StencilCoeffs s1 = rational(1, 4, {-1, 0, 1, 2, 3}, {-3, -10, 18, -6, 1}, 12, 1);
    if (shift == 0) return s0;
    if (shift == 1) return s1;
    throw Error(ErrorCode::UnsupportedStencil, "one-sided shift must be 0 or 1");
}

std::complex<double> apply_stencil(std::span<const std::complex<double>> f, const StencilCoeffs& c, int index,
                                   double h) {
    return apply_impl(f, c, index, h);
}

double apply_stencil(std::span<const double> f, const StencilCoeffs& c, int index, double h) {
    return apply_impl(f, c, index, h);
}

}  // namespace nlh
