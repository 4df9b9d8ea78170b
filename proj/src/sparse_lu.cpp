#include "nlh/sparse_lu.hpp"

#include <cmath>

#include "nlh/errors.hpp"

#ifdef NLH_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

namespace nlh {

template <class Scalar>
struct SparseLU<Scalar>::Impl {
#ifdef NLH_HAVE_UMFPACK
    Eigen::UmfPackLU<Matrix> lu;
#else
    Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu;
#endif
    bool analyzed = false;
    Eigen::Index rows = -1;
    Eigen::Index nnz = -1;
};

template <class Scalar>
SparseLU<Scalar>::SparseLU() : impl_(std::make_unique<Impl>()) {}

template <class Scalar>
SparseLU<Scalar>::~SparseLU() = default;

template <class Scalar>
void SparseLU<Scalar>::factorize(const Matrix& A) {
    if (!impl_->analyzed || impl_->rows != A.rows() || impl_->nnz != A.nonZeros()) {
        impl_->lu.analyzePattern(A);
        impl_->analyzed = true;
        impl_->rows = A.rows();
        impl_->nnz = A.nonZeros();
    }
    impl_->lu.factorize(A);
    if (impl_->lu.info() != Eigen::Success) throw Error(ErrorCode::SingularMatrix, "sparse LU factorization failed");
}

template <class Scalar>
typename SparseLU<Scalar>::Vector SparseLU<Scalar>::solve(const Vector& rhs) const {
    Vector x = impl_->lu.solve(rhs);
    if (impl_->lu.info() != Eigen::Success) throw Error(ErrorCode::SingularMatrix, "sparse LU solve failed");
    return x;
}

template class SparseLU<double>;
template class SparseLU<cd>;

namespace {

template <class Scalar>
double inf_norm(const Eigen::SparseMatrix<Scalar>& A) {
    Eigen::VectorXd rs = Eigen::VectorXd::Zero(A.rows());
    for (Eigen::Index c = 0; c < A.outerSize(); ++c)
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(A, c); it; ++it) rs[it.row()] += std::abs(it.value());
    return rs.size() ? rs.maxCoeff() : 0.0;
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> checked_solve(const Eigen::SparseMatrix<Scalar>& A,
                                                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b) {
    SparseLU<Scalar> lu;
    lu.factorize(A);
    auto x = lu.solve(b);
    const double r = (A * x - b).template lpNorm<Eigen::Infinity>();
    const double bound = 1e-10 * (inf_norm(A) * x.template lpNorm<Eigen::Infinity>() + b.template lpNorm<Eigen::Infinity>());
    if (!std::isfinite(r) || r > bound) throw Error(ErrorCode::SingularMatrix, "LU residual check failed");
    return x;
}

}  // namespace

Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& rhs) {
    return checked_solve(A, rhs);
}

Eigen::VectorXcd sparse_lu_solve(const Eigen::SparseMatrix<cd>& A, const Eigen::VectorXcd& rhs) {
    return checked_solve(A, rhs);
}

bool tridiagonal_solve(std::vector<cd> dl, std::vector<cd> d, std::vector<cd> du, std::vector<cd>& b) {
    const size_t n = d.size();
    if (n == 0) return true;
    for (size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) return false;
            cd f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            dl[i] = 0.0;
        } else {
            cd f = d[i] / dl[i];
            d[i] = dl[i];
            cd t = d[i + 1];
            d[i + 1] = du[i] - f * t;
            if (i + 2 < n) {
                dl[i] = du[i + 1];
                du[i + 1] = -f * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = t;
            t = b[i];
            b[i] = b[i + 1];
            b[i + 1] = t - f * b[i + 1];
        }
    }
    if (d[n - 1] == 0.0) return false;
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (size_t i = n - 2; i-- > 0;) b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    return true;
}

}  // namespace nlh
