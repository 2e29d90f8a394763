#pragma once

#include <memory>

#include "fwi/forward.hpp"
#include "fwi/ilu.hpp"
#include "fwi/krylov.hpp"

namespace fwi {

// One Gauss-Newton linearization point: the model s_n, its factorized
// Helmholtz operator, background fields u_n, the data residual, weights and
// the Tikhonov term eps*I. The model space is real; adjoint results are
// projected onto it.
struct GnState {
    Grid2D grid;
    PmlProfile profile;
    SlownessModel model;
    double freq_hz = 0.0;
    double omega = 0.0;
    double epsilon = 0.0;
    bool drop_reg_term = false;  // zero the -eps*s_n right-hand-side term

    Survey survey;
    WeightMatrix weights;
    HelmholtzOperator op;
    std::shared_ptr<const LuFactors> lu;
    std::shared_ptr<const IluFactors> ilu;  // present only when requested

    Wavefield u;  // u_n
    DataVector d_obs, d_pred, r;

    // Caches derived from survey geometry.
    std::vector<int> src_node;
    std::vector<std::vector<int>> recv_node;
    std::vector<int> offset;  // data offsets, size K+1

    int model_size() const { return grid.num_nodes(); }
    int num_sources() const { return survey.num_sources(); }
    int num_data() const { return static_cast<int>(d_obs.size()); }
};

struct GnStateOptions {
    double epsilon = 0.0;
    bool drop_reg_term = false;
    WeightMode weight_mode = WeightMode::identity;
    std::optional<int> ilu_level;
    double ilu_diag_shift = 0.0;
};

GnState make_gn_state(const Grid2D& grid, const PmlProfile& profile,
                      const SlownessModel& model, const Survey& survey,
                      double freq_hz, const DataVector& d_obs,
                      const GnStateOptions& options);

// J v = Q A^{-1} P v: one forward solve per source.
DataVector jacobian_apply(const GnState& state, const RealVector& v);

// P^* A^{-*} Q^* w summed over sources, in complex arithmetic.
ComplexVector jacobian_adjoint_apply_complex(const GnState& state, const DataVector& w);

// Real part of the above (the model space is real).
RealVector jacobian_adjoint_apply(const GnState& state, const DataVector& w);

// H v = Re(J^* W^T W J v) + eps v: two solves per source per application.
RealVector hessian_apply(const GnState& state, const RealVector& v);

// g = Re(J^* W^T W r) - eps s_n (the regularization term is dropped when the
// state carries the drop flag).
RealVector gradient(const GnState& state);

// ||H ds - g|| / ||g||, the cross-solver comparison metric; 0 when g = 0.
double normal_residual(const GnState& state, const RealVector& g, const RealVector& ds);

struct StepResult {
    RealVector delta_s;
    ConvergenceLog log;
};

// CG on the normal equations H ds = g. The log's residual doubles as the
// normal-equation metric.
StepResult rsgn_cg_step(const GnState& state, double tol, int maxit);

}  // namespace fwi
