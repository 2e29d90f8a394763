#pragma once

#include <complex>

namespace fwi {

// Uniform 2D finite-difference grid with an absorbing (PML) frame of n_pml
// nodes on every side. Nodes are numbered row-major with x fastest:
// node(ix, iz) = iz*nx + ix. The outermost node ring carries homogeneous
// Dirichlet conditions.
struct Grid2D {
    int nx = 0;
    int nz = 0;
    double h = 0.0;  // spacing in meters, uniform in both axes
    int n_pml = 0;   // PML thickness in nodes per side

    int num_nodes() const { return nx * nz; }
    int index(int ix, int iz) const { return iz * nx + ix; }
    int ix_of(int node) const { return node % nx; }
    int iz_of(int node) const { return node / nx; }

    bool on_boundary(int ix, int iz) const {
        return ix == 0 || iz == 0 || ix == nx - 1 || iz == nz - 1;
    }
    // Core = nodes outside the PML frame.
    bool in_core(int ix, int iz) const {
        return ix >= n_pml && ix < nx - n_pml && iz >= n_pml && iz < nz - n_pml;
    }
    // Valid location for a source or receiver: in the core, off the Dirichlet ring.
    bool usable_node(int ix, int iz) const {
        return in_core(ix, iz) && !on_boundary(ix, iz);
    }
    int core_nx() const { return nx - 2 * n_pml; }
    int core_nz() const { return nz - 2 * n_pml; }
};

Grid2D build_grid(int nx, int nz, double h, int n_pml);

// Complex coordinate stretch 1 + i*sigma(t)/omega with sigma(t) = sigma_max * t^power,
// where t is the normalized depth into the PML (t = 1 at the outer boundary).
// Equals exactly 1 everywhere outside the PML frame.
struct PmlProfile {
    double sigma_max = 0.0;  // 1/s
    double power = 2.0;
};

// sigma_max = 3 c_ref ln(1e3) / (2 L_pml): quadratic-ramp amplitude for a
// ~1e-3 target reflection coefficient at reference speed c_ref.
PmlProfile make_pml_profile(const Grid2D& grid, double c_ref, double power = 2.0);

enum class Axis { X, Z };

// Stretch at a (possibly half-integer) node position along one axis.
std::complex<double> stretch(const Grid2D& grid, const PmlProfile& profile,
                             Axis axis, double position, double omega);

}  // namespace fwi
