#pragma once

#include <tuple>

#include "fwi/vec.hpp"

namespace fwi {

// Compressed sparse row storage with complex entries. Column indices are
// strictly increasing within each row; explicit zeros are tolerated.
struct SparseMatrixCSR {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;  // size rows + 1
    std::vector<int> col_idx;
    ComplexVector values;

    int nnz() const { return static_cast<int>(col_idx.size()); }
    Complex at(int i, int j) const;  // 0 if not stored

    // Duplicate triplets are summed; entries end up sorted per row.
    static SparseMatrixCSR from_triplets(int rows, int cols,
                                         std::vector<std::tuple<int, int, Complex>> triplets);
    static SparseMatrixCSR identity(int n);
};

// y = A x, or y = A^H x when adjoint is set (conjugate transpose).
ComplexVector spmv(const SparseMatrixCSR& a, const ComplexVector& x, bool adjoint = false);

}  // namespace fwi
