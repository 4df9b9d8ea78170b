#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "nlh/field.hpp"

namespace nlh {

/// Sparse direct LU for a fixed pattern: analyze once, refactorize per iteration.
template <class Scalar>
class SparseLU {
public:
    using Matrix = Eigen::SparseMatrix<Scalar>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    SparseLU();
    ~SparseLU();
    SparseLU(const SparseLU&) = delete;
    SparseLU& operator=(const SparseLU&) = delete;

    /// Throws SingularMatrix when the factorization fails.
    void factorize(const Matrix& A);
    Vector solve(const Vector& rhs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

extern template class SparseLU<double>;
extern template class SparseLU<cd>;

/// One-shot solve with the residual check ||Ax - b|| <= 1e-10 (||A|| ||x|| + ||b||).
Eigen::VectorXd sparse_lu_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& rhs);
Eigen::VectorXcd sparse_lu_solve(const Eigen::SparseMatrix<cd>& A, const Eigen::VectorXcd& rhs);

/// Gaussian elimination with partial pivoting on a tridiagonal system; lower/upper are
/// the sub- and super-diagonals (length n-1). Returns false on a zero pivot.
bool tridiagonal_solve(std::vector<cd> lower, std::vector<cd> diag, std::vector<cd> upper, std::vector<cd>& rhs);

}  // namespace nlh
