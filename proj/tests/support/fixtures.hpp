#pragma once

#include <random>

#include "fwi/driver.hpp"
#include "fwi/model_io.hpp"

namespace fixtures {

using namespace fwi;

inline std::vector<DataVector> simulate_blocks(const Grid2D& grid, const PmlProfile& profile,
                                               const SlownessModel& model,
                                               const Survey& survey) {
    std::vector<DataVector> blocks;
    for (double f : survey.frequencies_hz) {
        const double omega = 2.0 * 3.14159265358979323846 * f;
        const HelmholtzOperator op = assemble_helmholtz(grid, profile, model, omega);
        const LuFactors lu = LuFactors::factor(op.a);
        blocks.push_back(observe(grid, survey, solve_forward(lu, grid, survey)));
    }
    return blocks;
}

inline SlownessModel constant_model(const Grid2D& grid, double velocity_mps) {
    SlownessModel m;
    m.s.assign(grid.num_nodes(), 1.0 / (velocity_mps * velocity_mps));
    return m;
}

inline SlownessModel lens_slowness(const Grid2D& grid, double background_mps,
                                   double amplitude_mps, double cx, double cz,
                                   double radius_nodes) {
    return make_lens_model(grid, background_mps, amplitude_mps, cx, cz, radius_nodes)
        .to_slowness();
}

struct Instance {
    Grid2D grid;
    PmlProfile profile;
    SlownessModel truth;
    SlownessModel initial;
    Survey survey;
    std::vector<DataVector> observed;
    GnState state;
};

// The one desk-scale instance shared across suites: 12x12 grid, n_pml = 2,
// 2 sources with 6 receivers each, eps = 1e-2. Units are normalized
// (background speed 1, unit spacing, 0.15 Hz) so the data and Tikhonov terms
// of the Hessian are commensurate and dense references resolve to machine
// accuracy. Observed data come from a lens model, the linearization point is
// the constant background.
constexpr double kStdFreqHz = 0.15;

inline Instance standard_instance(GnStateOptions opts = {}) {
    Instance inst;
    inst.grid = build_grid(12, 12, 1.0, 2);
    inst.profile = make_pml_profile(inst.grid, 1.0);
    inst.truth = lens_slowness(inst.grid, 1.0, 0.15, 5.5, 5.5, 2.0);
    inst.initial = constant_model(inst.grid, 1.0);

    inst.survey.frequencies_hz = {kStdFreqHz};
    Survey::Source s1;
    s1.ix = 3;
    s1.iz = 3;
    Survey::Source s2;
    s2.ix = 8;
    s2.iz = 3;
    for (int ix = 3; ix <= 8; ++ix) {
        s1.receivers.emplace_back(ix, 8);
        s2.receivers.emplace_back(ix, 8);
    }
    inst.survey.sources = {s1, s2};

    inst.observed = simulate_blocks(inst.grid, inst.profile, inst.truth, inst.survey);
    if (opts.epsilon == 0.0) opts.epsilon = 1e-2;
    inst.state = make_gn_state(inst.grid, inst.profile, inst.initial, inst.survey,
                               kStdFreqHz, inst.observed[0], opts);
    return inst;
}

// Same geometry, single source with 3 receivers.
inline Instance tiny_instance(GnStateOptions opts = {}) {
    Instance inst;
    inst.grid = build_grid(12, 12, 1.0, 2);
    inst.profile = make_pml_profile(inst.grid, 1.0);
    inst.truth = lens_slowness(inst.grid, 1.0, 0.15, 5.5, 5.5, 2.0);
    inst.initial = constant_model(inst.grid, 1.0);
    inst.survey.frequencies_hz = {kStdFreqHz};
    Survey::Source s1;
    s1.ix = 5;
    s1.iz = 3;
    s1.receivers = {{4, 8}, {6, 8}, {8, 8}};
    inst.survey.sources = {s1};
    inst.observed = simulate_blocks(inst.grid, inst.profile, inst.truth, inst.survey);
    if (opts.epsilon == 0.0) opts.epsilon = 1e-2;
    inst.state = make_gn_state(inst.grid, inst.profile, inst.initial, inst.survey,
                               kStdFreqHz, inst.observed[0], opts);
    return inst;
}

inline RealVector random_real(int n, unsigned seed, double scale = 1.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    RealVector v(n);
    for (auto& x : v) x = scale * dist(rng);
    return v;
}

inline ComplexVector random_complex(int n, unsigned seed, double scale = 1.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    ComplexVector v(n);
    for (auto& x : v) x = scale * Complex(dist(rng), dist(rng));
    return v;
}

inline double rel_err(const RealVector& got, const RealVector& want) {
    RealVector d = got;
    axpy(-1.0, want, d);
    const double w = norm(want);
    return w > 0.0 ? norm(d) / w : norm(d);
}

inline double rel_err(const ComplexVector& got, const ComplexVector& want) {
    ComplexVector d = got;
    axpy(Complex(-1.0), want, d);
    const double w = norm(want);
    return w > 0.0 ? norm(d) / w : norm(d);
}

// || A - B ||_F / || A ||_F over two CSR matrices.
inline double frobenius_rel_diff(const SparseMatrixCSR& a, const SparseMatrixCSR& b) {
    double diff2 = 0.0, ref2 = 0.0;
    for (int i = 0; i < a.rows; ++i) {
        int pa = a.row_ptr[i], pb = b.row_ptr[i];
        const int ea = a.row_ptr[i + 1], eb = b.row_ptr[i + 1];
        while (pa < ea || pb < eb) {
            const int ca = pa < ea ? a.col_idx[pa] : a.cols;
            const int cb = pb < eb ? b.col_idx[pb] : b.cols;
            if (ca < cb) {
                diff2 += std::norm(a.values[pa]);
                ref2 += std::norm(a.values[pa]);
                ++pa;
            } else if (cb < ca) {
                diff2 += std::norm(b.values[pb]);
                ++pb;
            } else {
                diff2 += std::norm(a.values[pa] - b.values[pb]);
                ref2 += std::norm(a.values[pa]);
                ++pa;
                ++pb;
            }
        }
    }
    return ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
}

// Velocity-space vertical moving-average smoothing, used to build initial
// models for inversion scenarios.
inline SlownessModel smooth_vertical(const Grid2D& grid, const SlownessModel& model,
                                     int half_window) {
    RealVector vel(model.s.size());
    for (std::size_t i = 0; i < vel.size(); ++i) vel[i] = 1.0 / std::sqrt(model.s[i]);
    SlownessModel out = model;
    for (int ix = 0; ix < grid.nx; ++ix) {
        for (int iz = 0; iz < grid.nz; ++iz) {
            double acc = 0.0;
            int cnt = 0;
            for (int w = -half_window; w <= half_window; ++w) {
                const int z = iz + w;
                if (z < 0 || z >= grid.nz) continue;
                acc += vel[grid.index(ix, z)];
                ++cnt;
            }
            const double v = acc / cnt;
            out.s[grid.index(ix, iz)] = 1.0 / (v * v);
        }
    }
    return out;
}

}  // namespace fixtures
