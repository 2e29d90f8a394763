#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "fwi/vec.hpp"

namespace fwi {

// Per-iteration solver record. Entry 0 is the initial state; residual norms
// are relative to the right-hand side. Wall times are seconds since solver
// start with observer callbacks excluded, so they measure solver work only.
struct ConvergenceLog {
    struct Entry {
        int iteration = 0;
        double residual_norm = 0.0;              // true relative residual
        std::optional<double> normal_residual;   // reduced normal-equation metric
        std::optional<double> precond_residual;  // solver-internal residual (GMRes)
        double wall_time = 0.0;
    };
    std::vector<Entry> entries;
    bool converged = false;
    bool stagnated = false;

    int iterations() const { return entries.empty() ? 0 : entries.back().iteration; }
    double final_residual() const {
        return entries.empty() ? 0.0 : entries.back().residual_norm;
    }
};

struct CgBreakdownError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class S>
double real_of(const S& v) {
    if constexpr (is_complex<S>::value)
        return v.real();
    else
        return v;
}

template <class S>
double imag_of(const S& v) {
    if constexpr (is_complex<S>::value)
        return v.imag();
    else
        return 0.0;
}

template <class S>
S conj_of(const S& v) {
    if constexpr (is_complex<S>::value)
        return std::conj(v);
    else
        return v;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Conjugate gradients for a Hermitian positive-definite operator. Starts from
// x = 0 and stops when the relative residual reaches tol or after maxit
// iterations. Non-positive curvature raises CgBreakdownError.
template <class Vec, class Op>
std::pair<Vec, ConvergenceLog> cg(Op&& apply, const Vec& b, double tol, int maxit) {
    using S = decltype(dot(b, b));
    const auto t0 = std::chrono::steady_clock::now();

    Vec x = b;
    scal(S(0), x);
    ConvergenceLog log;
    const double bnorm = norm(b);
    if (bnorm == 0.0) {
        log.entries.push_back({0, 0.0, {}, {}, detail::seconds_since(t0)});
        log.converged = true;
        return {x, log};
    }
    log.entries.push_back({0, 1.0, {}, {}, detail::seconds_since(t0)});

    Vec r = b;
    Vec p = r;
    S rho = dot(r, r);
    for (int it = 1; it <= maxit; ++it) {
        Vec ap = apply(p);
        const S pap = dot(p, ap);
        const double re = detail::real_of(pap);
        if (!(re > 0.0) || std::abs(detail::imag_of(pap)) > 1e-6 * std::abs(re))
            throw CgBreakdownError("cg: non-positive curvature, operator is not HPD");
        const S alpha = rho / pap;
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        const double rn = norm(r) / bnorm;
        log.entries.push_back({it, rn, {}, {}, detail::seconds_since(t0)});
        if (rn <= tol) {
            log.converged = true;
            break;
        }
        const S rho_new = dot(r, r);
        const S beta = rho_new / rho;
        rho = rho_new;
        scal(beta, p);
        axpy(S(1), r, p);
    }
    return {x, log};
}

// Restarted GMRes with LEFT preconditioning. The log records both the true
// relative residual ||b - A x_k|| / ||b|| (which also gates convergence) and
// the internal preconditioned residual. The observer receives every iterate;
// returning true from it stops the solve early. If a full restart cycle passes
// without reducing the true residual, the best iterate seen so far is returned
// with the stagnated flag set.
template <class Vec, class OpA, class OpM>
std::pair<Vec, ConvergenceLog> gmres(
    OpA&& apply, OpM&& precond, const Vec& b, int restart, double tol, int maxit,
    const std::type_identity_t<std::function<bool(int, const Vec&)>>& observer = {}) {
    using S = decltype(dot(b, b));
    if (restart < 1) throw std::invalid_argument("gmres: restart must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    double observer_time = 0.0;
    auto elapsed = [&] { return detail::seconds_since(t0) - observer_time; };

    Vec x = b;
    scal(S(0), x);
    ConvergenceLog log;
    const double bnorm = norm(b);
    if (bnorm == 0.0) {
        log.entries.push_back({0, 0.0, {}, {}, elapsed()});
        log.converged = true;
        return {x, log};
    }
    const double pbnorm = norm(precond(b));
    if (pbnorm == 0.0)
        throw std::invalid_argument("gmres: preconditioner annihilates the right-hand side");
    log.entries.push_back({0, 1.0, {}, 1.0, elapsed()});

    Vec best = x;
    double best_res = 1.0;
    double true_res = 1.0;
    int iter = 0;
    bool stop_requested = false;

    while (iter < maxit && !log.converged && !stop_requested) {
        // r0 = M^{-1}(b - A x)
        Vec ax = apply(x);
        Vec rraw = b;
        axpy(S(-1), ax, rraw);
        Vec r0 = precond(rraw);
        const double beta = norm(r0);
        const double cycle_start_res = true_res;
        if (beta == 0.0) break;

        std::vector<Vec> v;
        v.reserve(restart + 1);
        scal(S(1.0 / beta), r0);
        v.push_back(std::move(r0));

        std::vector<std::vector<S>> hcols;  // Hessenberg columns after rotations
        std::vector<S> gs_c, gs_s;          // Givens rotations
        std::vector<S> g(1, S(beta));
        Vec x_cand = x;
        bool happy = false;

        for (int j = 0; j < restart && iter < maxit; ++j) {
            ++iter;
            Vec w = precond(apply(v[j]));
            std::vector<S> h(j + 2, S(0));
            for (int i = 0; i <= j; ++i) {
                h[i] = dot(v[i], w);
                axpy(-h[i], v[i], w);
            }
            const double wn = norm(w);
            h[j + 1] = S(wn);

            for (int i = 0; i < j; ++i) {
                const S t = gs_c[i] * h[i] + gs_s[i] * h[i + 1];
                h[i + 1] = -detail::conj_of(gs_s[i]) * h[i] + gs_c[i] * h[i + 1];
                h[i] = t;
            }
            // New rotation zeroing h[j+1].
            S c, s, rr;
            {
                const double an = std::abs(h[j]), bn = std::abs(h[j + 1]);
                const double t = std::sqrt(an * an + bn * bn);
                if (bn == 0.0) {
                    c = S(1);
                    s = S(0);
                    rr = h[j];
                } else if (an == 0.0) {
                    c = S(0);
                    s = detail::conj_of(h[j + 1]) / S(bn);
                    rr = S(bn);
                } else {
                    c = S(an / t);
                    s = (h[j] / S(an)) * detail::conj_of(h[j + 1]) / S(t);
                    rr = (h[j] / S(an)) * S(t);
                }
            }
            gs_c.push_back(c);
            gs_s.push_back(s);
            h[j] = rr;
            h[j + 1] = S(0);
            g.push_back(-detail::conj_of(s) * g[j]);
            g[j] = c * g[j];
            hcols.push_back(h);

            const double prec_res = std::abs(g[j + 1]) / pbnorm;

            // Form the candidate iterate: y from the triangular system, x + V y.
            std::vector<S> y(j + 1);
            for (int i = j; i >= 0; --i) {
                S acc = g[i];
                for (int k2 = i + 1; k2 <= j; ++k2) acc -= hcols[k2][i] * y[k2];
                y[i] = acc / hcols[i][i];
            }
            x_cand = x;
            for (int i = 0; i <= j; ++i) axpy(y[i], v[i], x_cand);

            Vec resid = b;
            Vec ax2 = apply(x_cand);
            axpy(S(-1), ax2, resid);
            true_res = norm(resid) / bnorm;
            log.entries.push_back({iter, true_res, {}, prec_res, elapsed()});
            if (true_res < best_res) {
                best_res = true_res;
                best = x_cand;
            }
            if (observer) {
                const auto to0 = std::chrono::steady_clock::now();
                stop_requested = observer(iter, x_cand);
                observer_time += detail::seconds_since(to0);
            }
            if (true_res <= tol) log.converged = true;
            if (wn == 0.0) happy = true;
            if (log.converged || stop_requested || happy) break;
            scal(S(1.0 / wn), w);
            v.push_back(std::move(w));
        }
        x = x_cand;
        if (!log.converged && !stop_requested &&
            true_res >= cycle_start_res * (1.0 - 1e-12)) {
            log.stagnated = true;
            x = best;
            break;
        }
        if (happy && !log.converged && !stop_requested) {
            // Krylov space exhausted without meeting tol; nothing further to do.
            log.stagnated = true;
            x = best;
            break;
        }
    }
    return {x, log};
}

}  // namespace fwi
