#include "fwi/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace fwi {

Complex SparseMatrixCSR::at(int i, int j) const {
    if (i < 0 || i >= rows || j < 0 || j >= cols)
        throw std::out_of_range("SparseMatrixCSR::at: index out of range");
    const int lo = row_ptr[i], hi = row_ptr[i + 1];
    const auto first = col_idx.begin() + lo;
    const auto last = col_idx.begin() + hi;
    const auto it = std::lower_bound(first, last, j);
    if (it != last && *it == j) return values[it - col_idx.begin()];
    return 0.0;
}

SparseMatrixCSR SparseMatrixCSR::from_triplets(
    int rows, int cols, std::vector<std::tuple<int, int, Complex>> triplets) {
    if (rows < 0 || cols < 0)
        throw std::invalid_argument("from_triplets: negative dimensions");
    for (const auto& [i, j, v] : triplets) {
        (void)v;
        if (i < 0 || i >= rows || j < 0 || j >= cols)
            throw std::invalid_argument("from_triplets: triplet index out of range");
    }
    std::sort(triplets.begin(), triplets.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(std::get<0>(a), std::get<1>(a)) <
                         std::tie(std::get<0>(b), std::get<1>(b));
              });
    SparseMatrixCSR m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    m.col_idx.reserve(triplets.size());
    m.values.reserve(triplets.size());
    std::size_t k = 0;
    while (k < triplets.size()) {
        const int i = std::get<0>(triplets[k]);
        const int j = std::get<1>(triplets[k]);
        Complex v = 0.0;
        while (k < triplets.size() && std::get<0>(triplets[k]) == i &&
               std::get<1>(triplets[k]) == j) {
            v += std::get<2>(triplets[k]);
            ++k;
        }
        m.col_idx.push_back(j);
        m.values.push_back(v);
        m.row_ptr[i + 1] = static_cast<int>(m.col_idx.size());
    }
    for (int i = 0; i < rows; ++i)
        m.row_ptr[i + 1] = std::max(m.row_ptr[i + 1], m.row_ptr[i]);
    return m;
}

SparseMatrixCSR SparseMatrixCSR::identity(int n) {
    SparseMatrixCSR m;
    m.rows = m.cols = n;
    m.row_ptr.resize(n + 1);
    m.col_idx.resize(n);
    m.values.assign(n, 1.0);
    for (int i = 0; i <= n; ++i) m.row_ptr[i] = i;
    for (int i = 0; i < n; ++i) m.col_idx[i] = i;
    return m;
}

ComplexVector spmv(const SparseMatrixCSR& a, const ComplexVector& x, bool adjoint) {
    if (!adjoint) {
        if (static_cast<int>(x.size()) != a.cols)
            throw std::invalid_argument("spmv: dimension mismatch");
        ComplexVector y(a.rows, 0.0);
        for (int i = 0; i < a.rows; ++i) {
            Complex s = 0.0;
            for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
                s += a.values[k] * x[a.col_idx[k]];
            y[i] = s;
        }
        return y;
    }
    if (static_cast<int>(x.size()) != a.rows)
        throw std::invalid_argument("spmv: dimension mismatch (adjoint)");
    ComplexVector y(a.cols, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        const Complex xi = x[i];
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            y[a.col_idx[k]] += std::conj(a.values[k]) * xi;
    }
    return y;
}

}  // namespace fwi
