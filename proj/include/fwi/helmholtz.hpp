#pragma once

#include <optional>

#include "fwi/grid.hpp"
#include "fwi/sparse.hpp"

namespace fwi {

// Squared slowness (s^2/m^2) on the grid nodes; positive and finite
// everywhere. Bounds, when present, are used by the update clamp.
struct SlownessModel {
    RealVector s;
    std::optional<double> lower;
    std::optional<double> upper;

    void validate(const Grid2D& grid) const;
};

// Discrete Helmholtz operator -Dx(1/X Dx) - Dz(1/Z Dz) - w^2 s X Z on the
// 5-point stencil, with Dirichlet rows/columns eliminated symmetrically
// (unit diagonal, zeroed couplings). Without a PML the matrix is the real
// symmetric indefinite -Laplacian - w^2 M with M = diag(s).
struct HelmholtzOperator {
    SparseMatrixCSR a;
    double omega = 0.0;
    Grid2D grid;
    PmlProfile profile;
};

HelmholtzOperator assemble_helmholtz(const Grid2D& grid, const PmlProfile& profile,
                                     const SlownessModel& model, double omega);

// Diagonal matrix w^2 * diag(u), the sensitivity of the discrete operator to
// the squared slowness at a fixed field u.
SparseMatrixCSR assemble_p_block(const ComplexVector& u, double omega);

}  // namespace fwi
