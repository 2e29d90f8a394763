#pragma once

#include <utility>

#include "fwi/grid.hpp"
#include "fwi/helmholtz.hpp"
#include "fwi/lu.hpp"

namespace fwi {

enum class WeightMode { identity, offset };

// Acquisition geometry: monochromatic point sources with per-source receiver
// lists, shared across the configured frequencies. Data vectors are ordered
// source-major, receivers in listed order.
struct Survey {
    struct Source {
        int ix = 0, iz = 0;
        double amplitude = 1.0;
        std::vector<std::pair<int, int>> receivers;  // (ix, iz)
    };
    std::vector<double> frequencies_hz;
    std::vector<Source> sources;
    WeightMode weight_mode = WeightMode::identity;

    int num_sources() const { return static_cast<int>(sources.size()); }
    int num_data() const;
    std::vector<int> data_offsets() const;  // size K+1

    // Checks node placement; data presence is only required when require_data
    // is set (a receiver-free survey is a legitimate degenerate diagnostic).
    void validate(const Grid2D& grid, bool require_data = true) const;
};

using DataVector = ComplexVector;  // concatenated over sources, source-major

// Diagonal, real, non-negative data weights.
struct WeightMatrix {
    RealVector w;
};

WeightMatrix build_weights(const Survey& survey, WeightMode mode);

struct Wavefield {
    std::vector<ComplexVector> per_source;
};

// Per-source solves A u_k = f_k against a shared factorization; f_k is the
// discrete point load amplitude/h^2 at the source node.
Wavefield solve_forward(const LuFactors& factor, const Grid2D& grid, const Survey& survey);

// d_kj = u_k(receiver node j): sampling at receiver nodes.
DataVector observe(const Grid2D& grid, const Survey& survey, const Wavefield& u);

// Adjoint of observe: scatter data values back onto the grid.
Wavefield observe_adjoint(const Grid2D& grid, const Survey& survey, const DataVector& d);

// r = d_obs - d_pred.
DataVector residual(const DataVector& d_obs, const DataVector& d_pred);

// ||d_pred - d_obs|| / ||d_obs||, the logged misfit.
double relative_misfit(const DataVector& d_pred, const DataVector& d_obs);

}  // namespace fwi
