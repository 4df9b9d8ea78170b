#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nlh/field.hpp"
#include "nlh/grid.hpp"
#include "nlh/transverse.hpp"

namespace nlh {

/// F(E) = AE E + AP P(E) - b with P = |E|^(2 sigma) E taken pointwise.
struct SystemForm {
    Eigen::SparseMatrix<cd> AE;
    Eigen::SparseMatrix<cd> AP;
    Eigen::VectorXcd b;
    double sigma = 1.0;
};

struct Problem {
    GridND grid;
    MaterialStack mat;
    NodeTable nodes;
    Eigen::VectorXcd incL;  // transverse profile entering at z = 0
    Eigen::VectorXcd incR;  // transverse profile entering at z = Zmax
    TransverseEigensystem eig;
    Eigen::MatrixXcd Q;  // propagation part of the ghost relation
    Eigen::MatrixXcd G;  // injection part
    std::vector<TransverseOps> ops;
    SystemForm form;

    const TransverseOps& opsFor(double nu) const;
    int unknowns() const { return grid.nodes(); }
};

Problem make_problem(const GridND& grid, const MaterialStack& mat, const Eigen::VectorXcd& incL,
                     const Eigen::VectorXcd& incR);

/// Ghost columns n = -4 and n = N+4 for a given field.
Eigen::VectorXcd ghost_left(const Problem& p, const ComplexField2D& E);
Eigen::VectorXcd ghost_right(const Problem& p, const ComplexField2D& E);

/// Row residuals evaluated directly from the stencils (no sparse matrices).
cd residual_interior_cartesian(const Problem& p, const ComplexField2D& E, int n, int m);
cd residual_interior_cylindrical(const Problem& p, const ComplexField2D& E, int n, int m);
cd residual_exterior(const Problem& p, const ComplexField2D& E, int n, int m);
cd residual_interface(const Problem& p, const ComplexField2D& E, int n, int m);
cd residual_row(const Problem& p, const ComplexField2D& E, int n, int m);

/// Complex residual through the assembled sparse form.
Eigen::VectorXcd residual_form(const Problem& p, const Eigen::VectorXcd& E);

/// Real-split residual, (Re, Im) interleaved per node.
Eigen::VectorXd assemble_residual(const Problem& p, const ComplexField2D& E);

/// d(P_R, P_I)/d(E_R, E_I). Zero block for E = 0.
Eigen::Matrix2d kerr_jacobian_block(cd E, double sigma);

/// Real-split Jacobian with a fixed pattern whose values are refilled in place.
class JacobianAssembler {
public:
    explicit JacobianAssembler(const SystemForm& form);

    const Eigen::SparseMatrix<double>& fill(const Eigen::VectorXcd& E);
    const Eigen::SparseMatrix<double>& matrix() const { return J_; }

private:
    struct Block {
        cd ae;
        cd ap;
        int col;
        int v0;  // value index of (2r, 2c); (2r+1, 2c) follows
        int v1;  // value index of (2r, 2c+1)
    };
    double sigma_;
    std::vector<Block> blocks_;
    Eigen::SparseMatrix<double> J_;
};

Eigen::SparseMatrix<double> assemble_jacobian(const Problem& p, const ComplexField2D& E);

}  // namespace nlh
