#include "fwi/helmholtz.hpp"

#include <cmath>
#include <stdexcept>

namespace fwi {

void SlownessModel::validate(const Grid2D& grid) const {
    if (static_cast<int>(s.size()) != grid.num_nodes())
        throw std::invalid_argument("SlownessModel: size does not match grid");
    for (double v : s) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("SlownessModel: values must be positive and finite");
    }
}

HelmholtzOperator assemble_helmholtz(const Grid2D& grid, const PmlProfile& profile,
                                     const SlownessModel& model, double omega) {
    if (!(omega > 0.0))
        throw std::invalid_argument("assemble_helmholtz: omega must be positive");
    model.validate(grid);

    const double h2 = grid.h * grid.h;
    const double w2 = omega * omega;
    std::vector<std::tuple<int, int, Complex>> trips;
    trips.reserve(static_cast<std::size_t>(grid.num_nodes()) * 5);

    for (int iz = 0; iz < grid.nz; ++iz) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const int node = grid.index(ix, iz);
            if (grid.on_boundary(ix, iz)) {
                trips.emplace_back(node, node, 1.0);
                continue;
            }
            const Complex xi = stretch(grid, profile, Axis::X, ix, omega);
            const Complex xp = stretch(grid, profile, Axis::X, ix + 0.5, omega);
            const Complex xm = stretch(grid, profile, Axis::X, ix - 0.5, omega);
            const Complex zj = stretch(grid, profile, Axis::Z, iz, omega);
            const Complex zp = stretch(grid, profile, Axis::Z, iz + 0.5, omega);
            const Complex zm = stretch(grid, profile, Axis::Z, iz - 0.5, omega);

            const Complex cxp = zj / (h2 * xp);
            const Complex cxm = zj / (h2 * xm);
            const Complex czp = xi / (h2 * zp);
            const Complex czm = xi / (h2 * zm);

            const Complex diag =
                cxp + cxm + czp + czm - w2 * model.s[node] * xi * zj;
            trips.emplace_back(node, node, diag);

            // Couplings into Dirichlet columns are dropped (u = 0 there), which
            // keeps the no-PML matrix exactly symmetric.
            if (!grid.on_boundary(ix - 1, iz))
                trips.emplace_back(node, grid.index(ix - 1, iz), -cxm);
            if (!grid.on_boundary(ix + 1, iz))
                trips.emplace_back(node, grid.index(ix + 1, iz), -cxp);
            if (!grid.on_boundary(ix, iz - 1))
                trips.emplace_back(node, grid.index(ix, iz - 1), -czm);
            if (!grid.on_boundary(ix, iz + 1))
                trips.emplace_back(node, grid.index(ix, iz + 1), -czp);
        }
    }
    HelmholtzOperator op;
    op.a = SparseMatrixCSR::from_triplets(grid.num_nodes(), grid.num_nodes(),
                                          std::move(trips));
    op.omega = omega;
    op.grid = grid;
    op.profile = profile;
    return op;
}

SparseMatrixCSR assemble_p_block(const ComplexVector& u, double omega) {
    const int n = static_cast<int>(u.size());
    SparseMatrixCSR m;
    m.rows = m.cols = n;
    m.row_ptr.resize(n + 1);
    m.col_idx.resize(n);
    m.values.resize(n);
    const double w2 = omega * omega;
    for (int i = 0; i < n; ++i) {
        m.row_ptr[i] = i;
        m.col_idx[i] = i;
        m.values[i] = w2 * u[i];
    }
    m.row_ptr[n] = n;
    return m;
}

}  // namespace fwi
