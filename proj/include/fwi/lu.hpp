#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fwi/sparse.hpp"

namespace fwi {

struct SingularPivotError : std::runtime_error {
    int index;
    explicit SingularPivotError(int idx)
        : std::runtime_error("LU: singular pivot at elimination step " + std::to_string(idx)),
          index(idx) {}
};

// Sparse LU with partial pivoting by magnitude, row permutation only:
// Pr A = L U, i.e. A = Pr^T L U. L is unit lower triangular and U upper
// triangular, both stored column-wise in the pivoted row numbering
// (left-looking factorization with depth-first symbolic analysis per column).
class LuFactors {
public:
    static LuFactors factor(const SparseMatrixCSR& a);

    // Solves A x = b, or A^H x = b when adjoint is set. One call performs one
    // lower/upper triangular solve pair.
    ComplexVector solve(const ComplexVector& b, bool adjoint = false) const;

    int size() const { return n_; }
    // perm[k] = original row chosen as pivot at elimination step k.
    const std::vector<int>& row_perm() const { return perm_; }

    // Pr^T L U in the original row numbering, for verification.
    SparseMatrixCSR reassemble() const;

    // Triangular solve pairs performed through this object (not synchronized).
    std::int64_t solve_count() const { return solve_count_; }
    void reset_solve_count() const { solve_count_ = 0; }

private:
    int n_ = 0;
    std::vector<int> l_ptr_, l_idx_;  // strictly lower, unit diagonal implicit
    ComplexVector l_val_;
    std::vector<int> u_ptr_, u_idx_;  // upper; diagonal stored last per column
    ComplexVector u_val_;
    std::vector<int> perm_;
    mutable std::int64_t solve_count_ = 0;
};

inline LuFactors lu_factor(const SparseMatrixCSR& a) { return LuFactors::factor(a); }

inline ComplexVector lu_solve(const LuFactors& f, const ComplexVector& b,
                              bool adjoint = false) {
    return f.solve(b, adjoint);
}

}  // namespace fwi
