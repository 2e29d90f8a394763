#include "fwi/lu.hpp"

#include <algorithm>
#include <cmath>

namespace fwi {

namespace {

struct Csc {
    int n = 0;
    std::vector<int> ptr, idx;
    ComplexVector val;
};

Csc csc_from_csr(const SparseMatrixCSR& a) {
    Csc c;
    c.n = a.cols;
    c.ptr.assign(a.cols + 1, 0);
    c.idx.resize(a.nnz());
    c.val.resize(a.nnz());
    for (int k = 0; k < a.nnz(); ++k) c.ptr[a.col_idx[k] + 1]++;
    for (int j = 0; j < a.cols; ++j) c.ptr[j + 1] += c.ptr[j];
    std::vector<int> next(c.ptr.begin(), c.ptr.end() - 1);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const int p = next[a.col_idx[k]]++;
            c.idx[p] = i;  // rows ascend within a column by construction
            c.val[p] = a.values[k];
        }
    }
    return c;
}

}  // namespace

LuFactors LuFactors::factor(const SparseMatrixCSR& a) {
    if (a.rows != a.cols)
        throw std::invalid_argument("LuFactors::factor: matrix must be square");
    const int n = a.rows;
    const Csc ac = csc_from_csr(a);

    LuFactors f;
    f.n_ = n;
    f.perm_.reserve(n);

    // L columns built with original row indices, remapped once all pivots are known.
    std::vector<std::vector<std::pair<int, Complex>>> lcols(n);
    std::vector<std::vector<std::pair<int, Complex>>> ucols(n);

    std::vector<int> pinv(n, -1);  // original row -> pivot step, -1 if unpivoted
    ComplexVector x(n, 0.0);
    std::vector<int> visited(n, -1), cpos(n, 0), stack(n), pat;
    pat.reserve(n);

    for (int j = 0; j < n; ++j) {
        // Reach of A(:,j) over the graph of L, collected in postorder.
        pat.clear();
        for (int p = ac.ptr[j]; p < ac.ptr[j + 1]; ++p) {
            const int start = ac.idx[p];
            if (visited[start] == j) continue;
            int head = 0;
            stack[0] = start;
            visited[start] = j;
            cpos[start] = 0;
            while (head >= 0) {
                const int t = stack[head];
                const int k = pinv[t];
                bool descended = false;
                if (k >= 0) {
                    const auto& col = lcols[k];
                    while (cpos[t] < static_cast<int>(col.size())) {
                        const int child = col[cpos[t]++].first;
                        if (visited[child] != j) {
                            visited[child] = j;
                            cpos[child] = 0;
                            stack[++head] = child;
                            descended = true;
                            break;
                        }
                    }
                }
                if (!descended) {
                    pat.push_back(t);
                    --head;
                }
            }
        }

        for (int p = ac.ptr[j]; p < ac.ptr[j + 1]; ++p) x[ac.idx[p]] = ac.val[p];

        // Sparse triangular solve in topological (reverse postorder) order.
        for (auto it = pat.rbegin(); it != pat.rend(); ++it) {
            const int i = *it;
            const int k = pinv[i];
            if (k < 0) continue;
            const Complex xi = x[i];
            if (xi == 0.0) continue;
            for (const auto& [r, lv] : lcols[k]) x[r] -= lv * xi;
        }

        // Partial pivot: largest magnitude among unpivoted rows.
        int ip = -1;
        double best = -1.0;
        for (int t : pat) {
            if (pinv[t] >= 0) continue;
            const double m = std::abs(x[t]);
            if (m > best) {
                best = m;
                ip = t;
            }
        }
        if (ip < 0 || best == 0.0) throw SingularPivotError(j);
        const Complex piv = x[ip];

        auto& ucol = ucols[j];
        for (int t : pat) {
            if (pinv[t] >= 0) ucol.emplace_back(pinv[t], x[t]);
        }
        std::sort(ucol.begin(), ucol.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
        ucol.emplace_back(j, piv);  // diagonal last

        auto& lcol = lcols[j];
        for (int t : pat) {
            if (pinv[t] < 0 && t != ip && x[t] != 0.0)
                lcol.emplace_back(t, x[t] / piv);
        }
        pinv[ip] = j;
        f.perm_.push_back(ip);

        for (int t : pat) x[t] = 0.0;
    }

    // Finalize into flat column arrays; L rows remapped to pivot numbering.
    f.l_ptr_.assign(n + 1, 0);
    f.u_ptr_.assign(n + 1, 0);
    for (int j = 0; j < n; ++j) {
        f.l_ptr_[j + 1] = f.l_ptr_[j] + static_cast<int>(lcols[j].size());
        f.u_ptr_[j + 1] = f.u_ptr_[j] + static_cast<int>(ucols[j].size());
    }
    f.l_idx_.resize(f.l_ptr_[n]);
    f.l_val_.resize(f.l_ptr_[n]);
    f.u_idx_.resize(f.u_ptr_[n]);
    f.u_val_.resize(f.u_ptr_[n]);
    for (int j = 0; j < n; ++j) {
        int p = f.l_ptr_[j];
        std::vector<std::pair<int, Complex>> mapped;
        mapped.reserve(lcols[j].size());
        for (const auto& [r, v] : lcols[j]) mapped.emplace_back(pinv[r], v);
        std::sort(mapped.begin(), mapped.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
        for (const auto& [r, v] : mapped) {
            f.l_idx_[p] = r;
            f.l_val_[p] = v;
            ++p;
        }
        p = f.u_ptr_[j];
        for (const auto& [r, v] : ucols[j]) {
            f.u_idx_[p] = r;
            f.u_val_[p] = v;
            ++p;
        }
    }
    return f;
}

ComplexVector LuFactors::solve(const ComplexVector& b, bool adjoint) const {
    if (static_cast<int>(b.size()) != n_)
        throw std::invalid_argument("LuFactors::solve: dimension mismatch");
    ++solve_count_;
    const int n = n_;
    if (!adjoint) {
        ComplexVector x(n);
        for (int k = 0; k < n; ++k) x[k] = b[perm_[k]];
        // L y = Pb (unit diagonal, scatter form)
        for (int k = 0; k < n; ++k) {
            const Complex xk = x[k];
            if (xk == 0.0) continue;
            for (int p = l_ptr_[k]; p < l_ptr_[k + 1]; ++p) x[l_idx_[p]] -= l_val_[p] * xk;
        }
        // U x = y (diagonal last per column)
        for (int j = n - 1; j >= 0; --j) {
            const int dp = u_ptr_[j + 1] - 1;
            x[j] /= u_val_[dp];
            const Complex xj = x[j];
            if (xj == 0.0) continue;
            for (int p = u_ptr_[j]; p < dp; ++p) x[u_idx_[p]] -= u_val_[p] * xj;
        }
        return x;
    }
    // A^H x = b  =>  U^H z = b, L^H w = z, x[perm[k]] = w[k].
    ComplexVector z(n);
    for (int j = 0; j < n; ++j) {
        Complex s = b[j];
        const int dp = u_ptr_[j + 1] - 1;
        for (int p = u_ptr_[j]; p < dp; ++p) s -= std::conj(u_val_[p]) * z[u_idx_[p]];
        z[j] = s / std::conj(u_val_[dp]);
    }
    for (int j = n - 1; j >= 0; --j) {
        Complex s = z[j];
        for (int p = l_ptr_[j]; p < l_ptr_[j + 1]; ++p)
            s -= std::conj(l_val_[p]) * z[l_idx_[p]];
        z[j] = s;
    }
    ComplexVector x(n);
    for (int k = 0; k < n; ++k) x[perm_[k]] = z[k];
    return x;
}

SparseMatrixCSR LuFactors::reassemble() const {
    const int n = n_;
    std::vector<std::tuple<int, int, Complex>> trips;
    ComplexVector work(n, 0.0);
    std::vector<int> marked(n, -1), patt;
    for (int j = 0; j < n; ++j) {
        patt.clear();
        // column j of L U = sum_i U(i,j) * L(:,i), unit diagonal of L included
        for (int p = u_ptr_[j]; p < u_ptr_[j + 1]; ++p) {
            const int i = u_idx_[p];
            const Complex uv = u_val_[p];
            if (marked[i] != j) {
                marked[i] = j;
                work[i] = 0.0;
                patt.push_back(i);
            }
            work[i] += uv;
            for (int q = l_ptr_[i]; q < l_ptr_[i + 1]; ++q) {
                const int r = l_idx_[q];
                if (marked[r] != j) {
                    marked[r] = j;
                    work[r] = 0.0;
                    patt.push_back(r);
                }
                work[r] += l_val_[q] * uv;
            }
        }
        for (int k : patt) trips.emplace_back(perm_[k], j, work[k]);
    }
    return SparseMatrixCSR::from_triplets(n, n, std::move(trips));
}

}  // namespace fwi
