#pragma once

#include "fwi/reduced_space.hpp"

namespace fwi {

// Composite unknown of the saddle-point system: per-source field updates,
// the real model update and per-source adjoint fields. The model block is
// real by convention; accordingly the composite dot product is the REAL
// inner product Re<x,y> + ds.ds + Re<lambda,lambda>, under which the
// saddle-point operator below is symmetric.
struct KktVector {
    std::vector<ComplexVector> du;
    RealVector ds;
    std::vector<ComplexVector> lambda;

    static KktVector zeros(int num_sources, int field_size, int model_size);
    int num_sources() const { return static_cast<int>(du.size()); }
};

double dot(const KktVector& x, const KktVector& y);
double norm(const KktVector& x);
void axpy(double a, const KktVector& x, KktVector& y);
void scal(double a, KktVector& x);

// Applies the saddle-point operator
//   [ F    0    A^* ] [du]
//   [ 0    L   -P^* ] [ds]     with the middle block projected to Re,
//   [ A   -P    0   ] [la]
// where F = Q^* W^T W Q is applied matrix-free and L = eps I. Sparse products
// only, no linear solves.
KktVector kkt_apply(const GnState& state, const KktVector& xi);

// Right-hand side (Q^* W^T W r, -eps s_n, 0); the middle block is zeroed when
// the state carries the drop flag.
KktVector kkt_rhs(const GnState& state);

enum class PrecondMode { exact, ilu };

// Block back-substitution with the F block dropped:
//   (1) lambda = A^{-*} v1 per source
//   (2) ds     = (v2 + Re(P^* lambda)) / eps
//   (3) du     = A^{-1} (v3 + P ds) per source
// Exact mode uses the sparse LU of A, ilu mode the ILU(p) factors.
KktVector precond_apply(const GnState& state, const KktVector& v, PrecondMode mode);

struct FsgnOptions {
    PrecondMode mode = PrecondMode::exact;
    int restart = 30;
    double tol = 1e-10;  // true relative residual of the saddle system
    int maxit = 30;
    // Cadence for evaluating the normal-equation metric on iterates (each
    // evaluation costs one reduced-Hessian action); 0 disables it.
    int ecg_stride = 1;
    // When positive, stop as soon as the metric drops below this value.
    double ecg_stop_tol = 0.0;
};

// Preconditioned GMRes on the saddle system from xi0 = 0; returns the model
// block of the final iterate. Log entries carry the true saddle residual,
// the preconditioned residual and (per stride) the normal-equation metric.
StepResult fsgn_gmres_step(const GnState& state, const FsgnOptions& options);

}  // namespace fwi
