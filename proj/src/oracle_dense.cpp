#include "fwi/oracle_dense.hpp"

#include <cmath>
#include <stdexcept>

namespace fwi::oracle {

namespace {

constexpr double kGuardRail = 5e4;

void check_guard(const GnState& state) {
    const double dim =
        (2.0 * state.num_sources() + 1.0) * state.model_size();
    if (dim > kGuardRail)
        throw std::invalid_argument(
            "dense oracle: composite dimension exceeds the guard rail");
}

// Re-derived coordinate stretch; shares only the grid geometry with the
// production code.
std::complex<double> stretch_at(const Grid2D& g, const PmlProfile& prof, int n_axis,
                                double pos, double omega) {
    if (g.n_pml == 0) return {1.0, 0.0};
    const double depth = std::max(g.n_pml - pos, pos - (n_axis - 1 - g.n_pml));
    if (depth <= 0.0) return {1.0, 0.0};
    const double t = depth / g.n_pml;
    return {1.0, prof.sigma_max * std::pow(t, prof.power) / omega};
}

}  // namespace

Eigen::MatrixXcd dense_helmholtz(const Grid2D& grid, const PmlProfile& profile,
                                 const SlownessModel& model, double omega) {
    const int n = grid.num_nodes();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    const double h2 = grid.h * grid.h;
    const double w2 = omega * omega;
    for (int iz = 0; iz < grid.nz; ++iz) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const int node = grid.index(ix, iz);
            if (grid.on_boundary(ix, iz)) {
                a(node, node) = 1.0;
                continue;
            }
            const auto xi = stretch_at(grid, profile, grid.nx, ix, omega);
            const auto xp = stretch_at(grid, profile, grid.nx, ix + 0.5, omega);
            const auto xm = stretch_at(grid, profile, grid.nx, ix - 0.5, omega);
            const auto zj = stretch_at(grid, profile, grid.nz, iz, omega);
            const auto zp = stretch_at(grid, profile, grid.nz, iz + 0.5, omega);
            const auto zm = stretch_at(grid, profile, grid.nz, iz - 0.5, omega);
            const auto cxp = zj / (h2 * xp);
            const auto cxm = zj / (h2 * xm);
            const auto czp = xi / (h2 * zp);
            const auto czm = xi / (h2 * zm);
            a(node, node) = cxp + cxm + czp + czm - w2 * model.s[node] * xi * zj;
            if (!grid.on_boundary(ix - 1, iz)) a(node, grid.index(ix - 1, iz)) = -cxm;
            if (!grid.on_boundary(ix + 1, iz)) a(node, grid.index(ix + 1, iz)) = -cxp;
            if (!grid.on_boundary(ix, iz - 1)) a(node, grid.index(ix, iz - 1)) = -czm;
            if (!grid.on_boundary(ix, iz + 1)) a(node, grid.index(ix, iz + 1)) = -czp;
        }
    }
    return a;
}

DenseInstance build_instance(const GnState& state) {
    check_guard(state);
    DenseInstance inst;
    inst.n = state.model_size();
    inst.m = inst.n;
    inst.num_sources = state.num_sources();
    inst.num_data = state.num_data();
    inst.epsilon = state.epsilon;
    inst.omega = state.omega;
    inst.drop_reg_term = state.drop_reg_term;

    inst.a = dense_helmholtz(state.grid, state.profile, state.model, state.omega);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> alu(inst.a);

    inst.s = Eigen::Map<const Eigen::VectorXd>(state.model.s.data(), inst.n);
    inst.recv = state.recv_node;
    inst.offset = state.offset;
    inst.w.resize(inst.num_data);
    for (int i = 0; i < inst.num_data; ++i) inst.w[i] = state.weights.w[i];

    // Fields and residual recomputed densely.
    const double load = 1.0 / (state.grid.h * state.grid.h);
    inst.u.resize(inst.num_sources);
    inst.p_diag.resize(inst.num_sources);
    inst.r.resize(inst.num_data);
    const double w2 = state.omega * state.omega;
    for (int k = 0; k < inst.num_sources; ++k) {
        Eigen::VectorXcd f = Eigen::VectorXcd::Zero(inst.n);
        f[state.src_node[k]] = state.survey.sources[k].amplitude * load;
        inst.u[k] = alu.solve(f);
        inst.p_diag[k] = w2 * inst.u[k];
        for (std::size_t j = 0; j < inst.recv[k].size(); ++j) {
            const int i = inst.offset[k] + static_cast<int>(j);
            inst.r[i] = state.d_obs[i] - inst.u[k][inst.recv[k][j]];
        }
    }

    // Jacobian column by column: J(:,i) = Q A^{-1} P e_i. A^{-1} is shared
    // across sources, so invert once.
    const Eigen::MatrixXcd ainv = alu.solve(Eigen::MatrixXcd::Identity(inst.n, inst.n));
    inst.jac.resize(inst.num_data, inst.m);
    for (int k = 0; k < inst.num_sources; ++k) {
        for (std::size_t j = 0; j < inst.recv[k].size(); ++j) {
            const int row = inst.offset[k] + static_cast<int>(j);
            const int node = inst.recv[k][j];
            for (int i = 0; i < inst.m; ++i)
                inst.jac(row, i) = ainv(node, i) * inst.p_diag[k][i];
        }
    }

    const Eigen::VectorXd w2v = inst.w.array().square();
    const Eigen::MatrixXcd wjac = w2v.asDiagonal() * inst.jac;
    inst.hess = (inst.jac.adjoint() * wjac).real();
    inst.hess.diagonal().array() += inst.epsilon;
    inst.grad = (inst.jac.adjoint() * (w2v.asDiagonal() * inst.r)).real();
    if (!inst.drop_reg_term) inst.grad -= inst.epsilon * inst.s;
    return inst;
}

Eigen::MatrixXcd dense_jacobian(const DenseInstance& inst) { return inst.jac; }

Eigen::VectorXd dense_normal_solve(const DenseInstance& inst) {
    Eigen::VectorXd ds = inst.hess.ldlt().solve(inst.grad);
    // One refinement sweep to push the residual toward machine level.
    ds += inst.hess.ldlt().solve(inst.grad - inst.hess * ds).eval();
    return ds;
}

KktVector dense_kkt_solve(const DenseInstance& inst) {
    const int n = inst.n, m = inst.m, ks = inst.num_sources;
    const int kn = ks * n;
    const int dim = 4 * kn + m;
    // Unknown layout: [Re du | Im du | ds | Re la | Im la].
    const int o_reu = 0, o_imu = kn, o_ds = 2 * kn, o_rel = 2 * kn + m, o_iml = 3 * kn + m;

    const Eigen::MatrixXd ar = inst.a.real();
    const Eigen::MatrixXd ai = inst.a.imag();

    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

    for (int k = 0; k < ks; ++k) {
        const int ru = o_reu + k * n, iu = o_imu + k * n;
        const int rl = o_rel + k * n, il = o_iml + k * n;

        // Row 1: F du + A^* la = Q^* W^T W r, split into Re and Im rows.
        // (A^* la)_i = sum_j conj(A_ji) la_j.
        big.block(ru, rl, n, n) = ar.transpose();
        big.block(ru, il, n, n) = ai.transpose();
        big.block(iu, rl, n, n) = -ai.transpose();
        big.block(iu, il, n, n) = ar.transpose();
        for (std::size_t j = 0; j < inst.recv[k].size(); ++j) {
            const int node = inst.recv[k][j];
            const int di = inst.offset[k] + static_cast<int>(j);
            const double ww = inst.w[di] * inst.w[di];
            big(ru + node, ru + node) += ww;
            big(iu + node, iu + node) += ww;
            rhs[ru + node] += ww * inst.r[di].real();
            rhs[iu + node] += ww * inst.r[di].imag();
        }

        // Row 2 contribution: -Re(P^* la) with diagonal P.
        for (int i = 0; i < n; ++i) {
            big(o_ds + i, rl + i) -= inst.p_diag[k][i].real();
            big(o_ds + i, il + i) -= inst.p_diag[k][i].imag();
        }

        // Row 3: A du - P ds = 0, split into Re and Im rows.
        big.block(rl, ru, n, n) = ar;
        big.block(rl, iu, n, n) = -ai;
        big.block(il, ru, n, n) = ai;
        big.block(il, iu, n, n) = ar;
        for (int i = 0; i < n; ++i) {
            big(rl + i, o_ds + i) -= inst.p_diag[k][i].real();
            big(il + i, o_ds + i) -= inst.p_diag[k][i].imag();
        }
    }
    for (int i = 0; i < m; ++i) big(o_ds + i, o_ds + i) += inst.epsilon;
    if (!inst.drop_reg_term)
        rhs.segment(o_ds, m) = -inst.epsilon * inst.s;

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(big);
    Eigen::VectorXd xi = lu.solve(rhs);
    xi += lu.solve(rhs - big * xi).eval();

    KktVector out = KktVector::zeros(ks, n, m);
    for (int k = 0; k < ks; ++k) {
        for (int i = 0; i < n; ++i) {
            out.du[k][i] = Complex(xi[o_reu + k * n + i], xi[o_imu + k * n + i]);
            out.lambda[k][i] = Complex(xi[o_rel + k * n + i], xi[o_iml + k * n + i]);
        }
    }
    for (int i = 0; i < m; ++i) out.ds[i] = xi[o_ds + i];
    return out;
}

KktVector dense_kkt_apply(const DenseInstance& inst, const KktVector& xi) {
    const int n = inst.n, ks = inst.num_sources;
    if (xi.num_sources() != ks || static_cast<int>(xi.ds.size()) != inst.m)
        throw std::invalid_argument("dense_kkt_apply: shape mismatch");
    KktVector out = KktVector::zeros(ks, n, inst.m);
    const Eigen::Map<const Eigen::VectorXd> ds(xi.ds.data(), inst.m);
    Eigen::VectorXd mid = inst.epsilon * ds;
    for (int k = 0; k < ks; ++k) {
        const Eigen::Map<const Eigen::VectorXcd> du(xi.du[k].data(), n);
        const Eigen::Map<const Eigen::VectorXcd> la(xi.lambda[k].data(), n);
        Eigen::VectorXcd top = inst.a.adjoint() * la;
        for (std::size_t j = 0; j < inst.recv[k].size(); ++j) {
            const int node = inst.recv[k][j];
            const int di = inst.offset[k] + static_cast<int>(j);
            top[node] += inst.w[di] * inst.w[di] * du[node];
        }
        Eigen::VectorXcd bot =
            inst.a * du - inst.p_diag[k].cwiseProduct(ds.cast<Complex>());
        mid -= inst.p_diag[k].conjugate().cwiseProduct(la).real();
        for (int i = 0; i < n; ++i) {
            out.du[k][i] = top[i];
            out.lambda[k][i] = bot[i];
        }
    }
    for (int i = 0; i < inst.m; ++i) out.ds[i] = mid[i];
    return out;
}

}  // namespace fwi::oracle
