#include "fwi/reduced_space.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fwi {

namespace {

// rhs = P_k v with P_k = w^2 diag(u_k); v real.
ComplexVector apply_p(const GnState& st, int k, const RealVector& v) {
    const double w2 = st.omega * st.omega;
    const auto& uk = st.u.per_source[k];
    ComplexVector out(uk.size());
    for (std::size_t i = 0; i < uk.size(); ++i) out[i] = w2 * uk[i] * v[i];
    return out;
}

// out += conj(P_k) z = w^2 conj(u_k) .* z
void accumulate_p_adjoint(const GnState& st, int k, const ComplexVector& z,
                          ComplexVector& out) {
    const double w2 = st.omega * st.omega;
    const auto& uk = st.u.per_source[k];
    for (std::size_t i = 0; i < uk.size(); ++i) out[i] += w2 * std::conj(uk[i]) * z[i];
}

// Applies W^T W to the data slice of source k in place.
void apply_weights_sq(const GnState& st, int k, ComplexVector& d) {
    const int off = st.offset[k];
    for (std::size_t j = 0; j < d.size(); ++j) {
        const double w = st.weights.w[off + j];
        d[j] *= w * w;
    }
}

}  // namespace

GnState make_gn_state(const Grid2D& grid, const PmlProfile& profile,
                      const SlownessModel& model, const Survey& survey,
                      double freq_hz, const DataVector& d_obs,
                      const GnStateOptions& options) {
    if (!(freq_hz > 0.0))
        throw std::invalid_argument("make_gn_state: frequency must be positive");
    if (!(options.epsilon > 0.0))
        throw std::invalid_argument("make_gn_state: epsilon must be positive");
    model.validate(grid);
    survey.validate(grid, /*require_data=*/false);
    if (static_cast<int>(d_obs.size()) != survey.num_data())
        throw std::invalid_argument("make_gn_state: observed data length mismatch");

    GnState st;
    st.grid = grid;
    st.profile = profile;
    st.model = model;
    st.freq_hz = freq_hz;
    st.omega = 2.0 * std::numbers::pi * freq_hz;
    st.epsilon = options.epsilon;
    st.drop_reg_term = options.drop_reg_term;
    st.survey = survey;
    st.weights = build_weights(survey, options.weight_mode);

    st.op = assemble_helmholtz(grid, profile, model, st.omega);
    st.lu = std::make_shared<LuFactors>(LuFactors::factor(st.op.a));
    if (options.ilu_level)
        st.ilu = std::make_shared<IluFactors>(
            IluFactors::factor(st.op.a, *options.ilu_level, options.ilu_diag_shift));

    st.u = solve_forward(*st.lu, grid, survey);
    st.d_pred = observe(grid, survey, st.u);
    st.d_obs = d_obs;
    st.r = residual(d_obs, st.d_pred);

    st.offset = survey.data_offsets();
    st.src_node.reserve(survey.sources.size());
    st.recv_node.reserve(survey.sources.size());
    for (const auto& s : survey.sources) {
        st.src_node.push_back(grid.index(s.ix, s.iz));
        std::vector<int> nodes;
        nodes.reserve(s.receivers.size());
        for (const auto& [rx, rz] : s.receivers) nodes.push_back(grid.index(rx, rz));
        st.recv_node.push_back(std::move(nodes));
    }
    return st;
}

DataVector jacobian_apply(const GnState& state, const RealVector& v) {
    if (static_cast<int>(v.size()) != state.model_size())
        throw std::invalid_argument("jacobian_apply: model vector length mismatch");
    DataVector out(state.num_data());
    for (int k = 0; k < state.num_sources(); ++k) {
        const ComplexVector x = state.lu->solve(apply_p(state, k, v));
        const auto& nodes = state.recv_node[k];
        for (std::size_t j = 0; j < nodes.size(); ++j)
            out[state.offset[k] + j] = x[nodes[j]];
    }
    return out;
}

ComplexVector jacobian_adjoint_apply_complex(const GnState& state, const DataVector& w) {
    if (static_cast<int>(w.size()) != state.num_data())
        throw std::invalid_argument("jacobian_adjoint_apply: data length mismatch");
    ComplexVector acc(state.model_size(), 0.0);
    for (int k = 0; k < state.num_sources(); ++k) {
        ComplexVector y(state.model_size(), 0.0);
        const auto& nodes = state.recv_node[k];
        for (std::size_t j = 0; j < nodes.size(); ++j)
            y[nodes[j]] += w[state.offset[k] + j];
        const ComplexVector z = state.lu->solve(y, /*adjoint=*/true);
        accumulate_p_adjoint(state, k, z, acc);
    }
    return acc;
}

RealVector jacobian_adjoint_apply(const GnState& state, const DataVector& w) {
    return real_part(jacobian_adjoint_apply_complex(state, w));
}

RealVector hessian_apply(const GnState& state, const RealVector& v) {
    if (static_cast<int>(v.size()) != state.model_size())
        throw std::invalid_argument("hessian_apply: model vector length mismatch");
    ComplexVector acc(state.model_size(), 0.0);
    for (int k = 0; k < state.num_sources(); ++k) {
        const ComplexVector x = state.lu->solve(apply_p(state, k, v));
        const auto& nodes = state.recv_node[k];
        ComplexVector d(nodes.size());
        for (std::size_t j = 0; j < nodes.size(); ++j) d[j] = x[nodes[j]];
        apply_weights_sq(state, k, d);
        ComplexVector y(state.model_size(), 0.0);
        for (std::size_t j = 0; j < nodes.size(); ++j) y[nodes[j]] += d[j];
        const ComplexVector z = state.lu->solve(y, /*adjoint=*/true);
        accumulate_p_adjoint(state, k, z, acc);
    }
    RealVector out(state.model_size());
    for (int i = 0; i < state.model_size(); ++i)
        out[i] = acc[i].real() + state.epsilon * v[i];
    return out;
}

RealVector gradient(const GnState& state) {
    DataVector wr = state.r;
    for (std::size_t i = 0; i < wr.size(); ++i) {
        const double w = state.weights.w[i];
        wr[i] *= w * w;
    }
    RealVector g = jacobian_adjoint_apply(state, wr);
    if (!state.drop_reg_term)
        for (int i = 0; i < state.model_size(); ++i)
            g[i] -= state.epsilon * state.model.s[i];
    return g;
}

double normal_residual(const GnState& state, const RealVector& g, const RealVector& ds) {
    const double gn = norm(g);
    RealVector hds = hessian_apply(state, ds);
    axpy(-1.0, g, hds);
    const double rn = norm(hds);
    if (gn == 0.0) return rn == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return rn / gn;
}

StepResult rsgn_cg_step(const GnState& state, double tol, int maxit) {
    const RealVector g = gradient(state);
    auto [ds, log] = cg([&state](const RealVector& v) { return hessian_apply(state, v); },
                        g, tol, maxit);
    // For CG on H ds = g the recurrence residual is the normal-equation metric.
    for (auto& e : log.entries) e.normal_residual = e.residual_norm;
    return {std::move(ds), std::move(log)};
}

}  // namespace fwi
