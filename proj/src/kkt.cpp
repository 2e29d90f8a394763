#include "fwi/kkt.hpp"

#include <stdexcept>

namespace fwi {

KktVector KktVector::zeros(int num_sources, int field_size, int model_size) {
    KktVector v;
    v.du.assign(num_sources, ComplexVector(field_size, 0.0));
    v.ds.assign(model_size, 0.0);
    v.lambda.assign(num_sources, ComplexVector(field_size, 0.0));
    return v;
}

double dot(const KktVector& x, const KktVector& y) {
    if (x.du.size() != y.du.size() || x.lambda.size() != y.lambda.size())
        throw std::invalid_argument("KktVector dot: block mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < x.du.size(); ++k) s += std::real(dot(x.du[k], y.du[k]));
    s += dot(x.ds, y.ds);
    for (std::size_t k = 0; k < x.lambda.size(); ++k)
        s += std::real(dot(x.lambda[k], y.lambda[k]));
    return s;
}

double norm(const KktVector& x) { return std::sqrt(dot(x, x)); }

void axpy(double a, const KktVector& x, KktVector& y) {
    for (std::size_t k = 0; k < x.du.size(); ++k) axpy(Complex(a), x.du[k], y.du[k]);
    axpy(a, x.ds, y.ds);
    for (std::size_t k = 0; k < x.lambda.size(); ++k)
        axpy(Complex(a), x.lambda[k], y.lambda[k]);
}

void scal(double a, KktVector& x) {
    for (auto& b : x.du) scal(Complex(a), b);
    scal(a, x.ds);
    for (auto& b : x.lambda) scal(Complex(a), b);
}

namespace {

void check_shape(const GnState& st, const KktVector& v) {
    if (v.num_sources() != st.num_sources() ||
        static_cast<int>(v.ds.size()) != st.model_size())
        throw std::invalid_argument("KktVector does not conform to the state");
}

// F_k x = Q_k^* (W_k^T W_k (Q_k x)), applied matrix-free.
ComplexVector apply_f(const GnState& st, int k, const ComplexVector& x) {
    ComplexVector out(x.size(), 0.0);
    const auto& nodes = st.recv_node[k];
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double w = st.weights.w[st.offset[k] + j];
        out[nodes[j]] += w * w * x[nodes[j]];
    }
    return out;
}

ComplexVector apply_p(const GnState& st, int k, const RealVector& v) {
    const double w2 = st.omega * st.omega;
    const auto& uk = st.u.per_source[k];
    ComplexVector out(uk.size());
    for (std::size_t i = 0; i < uk.size(); ++i) out[i] = w2 * uk[i] * v[i];
    return out;
}

void accumulate_re_p_adjoint(const GnState& st, int k, const ComplexVector& z,
                             RealVector& out) {
    const double w2 = st.omega * st.omega;
    const auto& uk = st.u.per_source[k];
    for (std::size_t i = 0; i < uk.size(); ++i)
        out[i] += std::real(w2 * std::conj(uk[i]) * z[i]);
}

}  // namespace

KktVector kkt_apply(const GnState& state, const KktVector& xi) {
    check_shape(state, xi);
    const int ksrc = state.num_sources();
    KktVector out = KktVector::zeros(ksrc, state.model_size(), state.model_size());
    for (int k = 0; k < ksrc; ++k) {
        // Row 1: F du + A^* lambda
        out.du[k] = apply_f(state, k, xi.du[k]);
        axpy(Complex(1.0), spmv(state.op.a, xi.lambda[k], /*adjoint=*/true), out.du[k]);
        // Row 3: A du - P ds
        out.lambda[k] = spmv(state.op.a, xi.du[k]);
        axpy(Complex(-1.0), apply_p(state, k, xi.ds), out.lambda[k]);
    }
    // Row 2: eps ds - Re(P^* lambda)
    for (int i = 0; i < state.model_size(); ++i) out.ds[i] = state.epsilon * xi.ds[i];
    RealVector pl(state.model_size(), 0.0);
    for (int k = 0; k < ksrc; ++k) accumulate_re_p_adjoint(state, k, xi.lambda[k], pl);
    axpy(-1.0, pl, out.ds);
    return out;
}

KktVector kkt_rhs(const GnState& state) {
    const int ksrc = state.num_sources();
    KktVector b = KktVector::zeros(ksrc, state.model_size(), state.model_size());
    for (int k = 0; k < ksrc; ++k) {
        const auto& nodes = state.recv_node[k];
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const double w = state.weights.w[state.offset[k] + j];
            b.du[k][nodes[j]] += w * w * state.r[state.offset[k] + j];
        }
    }
    if (!state.drop_reg_term)
        for (int i = 0; i < state.model_size(); ++i)
            b.ds[i] = -state.epsilon * state.model.s[i];
    return b;
}

KktVector precond_apply(const GnState& state, const KktVector& v, PrecondMode mode) {
    check_shape(state, v);
    if (mode == PrecondMode::ilu && !state.ilu)
        throw std::invalid_argument("precond_apply: state has no ILU factorization");
    const int ksrc = state.num_sources();
    auto solve = [&](const ComplexVector& rhs, bool adjoint) {
        return mode == PrecondMode::exact ? state.lu->solve(rhs, adjoint)
                                          : state.ilu->solve(rhs, adjoint);
    };
    KktVector out = KktVector::zeros(ksrc, state.model_size(), state.model_size());
    for (int k = 0; k < ksrc; ++k) out.lambda[k] = solve(v.du[k], /*adjoint=*/true);
    RealVector pl(state.model_size(), 0.0);
    for (int k = 0; k < ksrc; ++k) accumulate_re_p_adjoint(state, k, out.lambda[k], pl);
    for (int i = 0; i < state.model_size(); ++i)
        out.ds[i] = (v.ds[i] + pl[i]) / state.epsilon;
    for (int k = 0; k < ksrc; ++k) {
        ComplexVector rhs = apply_p(state, k, out.ds);
        axpy(Complex(1.0), v.lambda[k], rhs);
        out.du[k] = solve(rhs, /*adjoint=*/false);
    }
    return out;
}

StepResult fsgn_gmres_step(const GnState& state, const FsgnOptions& options) {
    const KktVector b = kkt_rhs(state);
    const RealVector g = gradient(state);
    const double gnorm = norm(g);

    std::vector<std::pair<int, double>> metric;
    std::function<bool(int, const KktVector&)> observer;
    if (options.ecg_stride > 0) {
        observer = [&](int iter, const KktVector& xi) {
            if (iter % options.ecg_stride != 0) return false;
            const double e = normal_residual(state, g, xi.ds);
            metric.emplace_back(iter, e);
            return options.ecg_stop_tol > 0.0 && e <= options.ecg_stop_tol;
        };
    }

    auto [xi, log] = gmres(
        [&state](const KktVector& v) { return kkt_apply(state, v); },
        [&state, &options](const KktVector& v) {
            return precond_apply(state, v, options.mode);
        },
        b, options.restart, options.tol, options.maxit, observer);

    if (!log.entries.empty())
        log.entries.front().normal_residual = gnorm > 0.0 ? 1.0 : 0.0;
    for (const auto& [iter, e] : metric) {
        for (auto& entry : log.entries) {
            if (entry.iteration == iter) {
                entry.normal_residual = e;
                break;
            }
        }
    }
    return {std::move(xi.ds), std::move(log)};
}

}  // namespace fwi
