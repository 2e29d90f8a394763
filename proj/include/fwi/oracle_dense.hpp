#pragma once

#include <Eigen/Dense>

#include "fwi/kkt.hpp"

namespace fwi::oracle {

// Brute-force dense reference for desk-scale verification. Everything is
// recomputed from the linearization point's inputs (grid, stretch profile,
// model, survey, observed data) with dense linear algebra; the only thing
// shared with the production modules is the node indexing convention. Guarded
// to composite dimensions (2K+1)*n <= 5e4.
struct DenseInstance {
    int n = 0;         // grid nodes
    int m = 0;         // model dimension (== n)
    int num_data = 0;  // total receivers
    int num_sources = 0;

    Eigen::MatrixXcd a;                    // dense Helmholtz operator
    std::vector<Eigen::VectorXcd> u;       // dense-recomputed fields
    std::vector<Eigen::VectorXcd> p_diag;  // w^2 * u_k
    std::vector<std::vector<int>> recv;    // receiver nodes per source
    std::vector<int> offset;
    Eigen::VectorXd w;                     // data weights
    Eigen::VectorXcd r;                    // dense-recomputed residual
    Eigen::VectorXd s;                     // linearization point
    double epsilon = 0.0;
    double omega = 0.0;
    bool drop_reg_term = false;

    Eigen::MatrixXcd jac;   // column-assembled Q A^{-1} P
    Eigen::MatrixXd hess;   // Re(J^* W^T W J) + eps I
    Eigen::VectorXd grad;   // Re(J^* W^T W r) - eps s
};

DenseInstance build_instance(const GnState& state);

// Independent dense assembly of the stretched 5-point operator.
Eigen::MatrixXcd dense_helmholtz(const Grid2D& grid, const PmlProfile& profile,
                                 const SlownessModel& model, double omega);

Eigen::MatrixXcd dense_jacobian(const DenseInstance& inst);

// Direct dense solve of the real-projected normal equations.
Eigen::VectorXd dense_normal_solve(const DenseInstance& inst);

// Direct dense solve of the saddle system with the model block kept real
// (complex blocks expanded into real/imaginary parts).
KktVector dense_kkt_solve(const DenseInstance& inst);

// Dense mirror of the matrix-free saddle operator.
KktVector dense_kkt_apply(const DenseInstance& inst, const KktVector& xi);

}  // namespace fwi::oracle
