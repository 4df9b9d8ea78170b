#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nlh {

using cd = std::complex<double>;

/// Complex field on the (N+7) x M grid, n-major with m contiguous.
class ComplexField2D {
public:
    ComplexField2D() = default;
    ComplexField2D(int N, int M) : N_(N), M_(M), v_(static_cast<size_t>(N + 7) * M, cd(0.0)) {}

    int N() const { return N_; }
    int M() const { return M_; }
    size_t size() const { return v_.size(); }

    cd& operator()(int n, int m) { return v_[static_cast<size_t>(n + 3) * M_ + m]; }
    const cd& operator()(int n, int m) const { return v_[static_cast<size_t>(n + 3) * M_ + m]; }

    cd* data() { return v_.data(); }
    const cd* data() const { return v_.data(); }
    std::vector<cd>& values() { return v_; }
    const std::vector<cd>& values() const { return v_; }

    Eigen::Map<Eigen::VectorXcd> vec() { return {v_.data(), static_cast<Eigen::Index>(v_.size())}; }
    Eigen::Map<const Eigen::VectorXcd> vec() const {
        return {v_.data(), static_cast<Eigen::Index>(v_.size())};
    }

    bool finite() const;
    double maxAbs() const;

private:
    int N_ = 0;
    int M_ = 0;
    std::vector<cd> v_;
};

/// Interleaved (Re, Im) layout used by the Newton solver.
Eigen::VectorXd to_real_split(const Eigen::VectorXcd& z);
Eigen::VectorXcd from_real_split(const Eigen::VectorXd& r);

inline cd kerr(cd e, double sigma) {
    double a = std::norm(e);
    if (a == 0.0) return 0.0;
    return std::pow(a, sigma) * e;
}

}  // namespace nlh
