#include "fwi/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fwi {

Grid2D build_grid(int nx, int nz, double h, int n_pml) {
    if (nx < 3 || nz < 3)
        throw std::invalid_argument("build_grid: need nx >= 3 and nz >= 3");
    if (!(h > 0.0))
        throw std::invalid_argument("build_grid: spacing h must be positive");
    if (n_pml < 0)
        throw std::invalid_argument("build_grid: n_pml must be non-negative");
    if (2 * n_pml >= std::min(nx, nz))
        throw std::invalid_argument("build_grid: PML frame consumes the whole domain");
    return Grid2D{nx, nz, h, n_pml};
}

PmlProfile make_pml_profile(const Grid2D& grid, double c_ref, double power) {
    if (!(c_ref > 0.0))
        throw std::invalid_argument("make_pml_profile: c_ref must be positive");
    if (!(power > 0.0))
        throw std::invalid_argument("make_pml_profile: power must be positive");
    PmlProfile p;
    p.power = power;
    if (grid.n_pml > 0) {
        const double l_pml = grid.n_pml * grid.h;
        p.sigma_max = 3.0 * c_ref * std::log(1e3) / (2.0 * l_pml);
    }
    return p;
}

std::complex<double> stretch(const Grid2D& grid, const PmlProfile& profile,
                             Axis axis, double position, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("stretch: omega must be positive");
    const int n = (axis == Axis::X) ? grid.nx : grid.nz;
    if (position < 0.0 || position > static_cast<double>(n - 1))
        throw std::invalid_argument("stretch: position outside the grid");
    if (grid.n_pml == 0) return {1.0, 0.0};
    // Depth into the nearer PML slab, in nodes; <= 0 in the core.
    const double depth = std::max(grid.n_pml - position,
                                  position - (n - 1 - grid.n_pml));
    if (depth <= 0.0) return {1.0, 0.0};
    const double t = depth / grid.n_pml;
    return {1.0, profile.sigma_max * std::pow(t, profile.power) / omega};
}

}  // namespace fwi
