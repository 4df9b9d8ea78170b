#include "nlh/field.hpp"

#include <cmath>

namespace nlh {

bool ComplexField2D::finite() const {
    for (const auto& z : v_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

double ComplexField2D::maxAbs() const {
    double m = 0.0;
    for (const auto& z : v_) m = std::max(m, std::abs(z));
    return m;
}

Eigen::VectorXd to_real_split(const Eigen::VectorXcd& z) {
    Eigen::VectorXd r(2 * z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        r[2 * i] = z[i].real();
        r[2 * i + 1] = z[i].imag();
    }
    return r;
}

Eigen::VectorXcd from_real_split(const Eigen::VectorXd& r) {
    Eigen::VectorXcd z(r.size() / 2);
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = cd(r[2 * i], r[2 * i + 1]);
    return z;
}

}  // namespace nlh
