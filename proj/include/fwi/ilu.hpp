#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fwi/sparse.hpp"

namespace fwi {

struct ZeroPivotError : std::runtime_error {
    int index;
    explicit ZeroPivotError(int idx)
        : std::runtime_error("ILU: zero pivot at row " + std::to_string(idx) +
                             " (consider a diagonal shift)"),
          index(idx) {}
};

// Level-of-fill incomplete LU, ILU(p), without pivoting. The symbolic pattern
// is computed by level propagation; numeric values by incomplete elimination
// restricted to that pattern. For p = 0 the union pattern of L+U equals the
// pattern of the input matrix; for p at least the exact fill level the factors
// coincide with an unpivoted LU.
class IluFactors {
public:
    // diag_shift is added to the diagonal of A before factorization; callers
    // may retry with a shift after a ZeroPivotError. Never applied silently.
    static IluFactors factor(const SparseMatrixCSR& a, int level, double diag_shift = 0.0);

    // Approximate solve of A x = b (A^H x = b when adjoint is set).
    ComplexVector solve(const ComplexVector& b, bool adjoint = false) const;

    int size() const { return n_; }
    int level() const { return level_; }

    // Factors as CSR matrices, for verification.
    SparseMatrixCSR lower_unit() const;  // unit diagonal included
    SparseMatrixCSR upper() const;

    std::int64_t solve_count() const { return solve_count_; }
    void reset_solve_count() const { solve_count_ = 0; }

private:
    int n_ = 0;
    int level_ = 0;
    std::vector<int> l_ptr_, l_idx_;  // strictly lower, CSR
    ComplexVector l_val_;
    std::vector<int> u_ptr_, u_idx_;  // diagonal + strict upper, CSR (diag first)
    ComplexVector u_val_;
    // Transposed copies for adjoint solves.
    std::vector<int> lt_ptr_, lt_idx_;
    ComplexVector lt_val_;
    std::vector<int> ut_ptr_, ut_idx_;
    ComplexVector ut_val_;
    mutable std::int64_t solve_count_ = 0;

    void build_transposes();
};

inline IluFactors ilu_factor(const SparseMatrixCSR& a, int level, double diag_shift = 0.0) {
    return IluFactors::factor(a, level, diag_shift);
}

inline ComplexVector ilu_solve(const IluFactors& f, const ComplexVector& b,
                               bool adjoint = false) {
    return f.solve(b, adjoint);
}

}  // namespace fwi
