#include "fwi/ilu.hpp"

#include <algorithm>
#include <map>

namespace fwi {

IluFactors IluFactors::factor(const SparseMatrixCSR& a, int level, double diag_shift) {
    if (a.rows != a.cols)
        throw std::invalid_argument("IluFactors::factor: matrix must be square");
    if (level < 0)
        throw std::invalid_argument("IluFactors::factor: fill level must be >= 0");
    const int n = a.rows;

    IluFactors f;
    f.n_ = n;
    f.level_ = level;

    // Symbolic phase: per-row fill levels. A-pattern entries start at level 0;
    // a fill entry (i,k) created through row j gets lev(i,j) + lev(j,k) + 1 and
    // is kept only when that is <= level.
    std::vector<std::vector<int>> lpat(n), upat(n);
    std::vector<std::vector<std::pair<int, int>>> ulev(n);  // strict upper (col, level)
    for (int i = 0; i < n; ++i) {
        std::map<int, int> lev;
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) lev[a.col_idx[p]] = 0;
        if (lev.find(i) == lev.end())
            throw std::invalid_argument("IluFactors::factor: missing diagonal at row " +
                                        std::to_string(i));
        for (auto it = lev.begin(); it != lev.end() && it->first < i; ++it) {
            const int j = it->first;
            const int lj = it->second;
            for (const auto& [k, lu] : ulev[j]) {
                const int nl = lj + lu + 1;
                if (nl > level) continue;
                auto found = lev.find(k);
                if (found == lev.end())
                    lev.emplace(k, nl);
                else
                    found->second = std::min(found->second, nl);
            }
        }
        for (const auto& [c, l] : lev) {
            if (c < i)
                lpat[i].push_back(c);
            else
                upat[i].push_back(c);
            if (c > i) ulev[i].emplace_back(c, l);
        }
    }

    // Numeric phase on the fixed pattern.
    f.l_ptr_.assign(n + 1, 0);
    f.u_ptr_.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) {
        f.l_ptr_[i + 1] = f.l_ptr_[i] + static_cast<int>(lpat[i].size());
        f.u_ptr_[i + 1] = f.u_ptr_[i] + static_cast<int>(upat[i].size());
    }
    f.l_idx_.resize(f.l_ptr_[n]);
    f.l_val_.resize(f.l_ptr_[n]);
    f.u_idx_.resize(f.u_ptr_[n]);
    f.u_val_.resize(f.u_ptr_[n]);

    ComplexVector w(n, 0.0);
    std::vector<int> stamp(n, -1);
    for (int i = 0; i < n; ++i) {
        for (int c : lpat[i]) {
            stamp[c] = i;
            w[c] = 0.0;
        }
        for (int c : upat[i]) {
            stamp[c] = i;
            w[c] = 0.0;
        }
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
            w[a.col_idx[p]] += a.values[p];
        w[i] += diag_shift;

        for (int j : lpat[i]) {  // ascending
            const int ud = f.u_ptr_[j];  // diagonal first in U row j
            w[j] /= f.u_val_[ud];
            const Complex lij = w[j];
            if (lij == 0.0) continue;
            for (int p = ud + 1; p < f.u_ptr_[j + 1]; ++p) {
                const int k = f.u_idx_[p];
                if (stamp[k] == i) w[k] -= lij * f.u_val_[p];
            }
        }
        if (w[i] == 0.0) throw ZeroPivotError(i);

        int p = f.l_ptr_[i];
        for (int c : lpat[i]) {
            f.l_idx_[p] = c;
            f.l_val_[p] = w[c];
            ++p;
        }
        p = f.u_ptr_[i];
        for (int c : upat[i]) {
            f.u_idx_[p] = c;
            f.u_val_[p] = w[c];
            ++p;
        }
    }
    f.build_transposes();
    return f;
}

void IluFactors::build_transposes() {
    const int n = n_;
    auto transpose = [n](const std::vector<int>& ptr, const std::vector<int>& idx,
                         const ComplexVector& val, std::vector<int>& tptr,
                         std::vector<int>& tidx, ComplexVector& tval) {
        tptr.assign(n + 1, 0);
        tidx.resize(idx.size());
        tval.resize(idx.size());
        for (int c : idx) tptr[c + 1]++;
        for (int j = 0; j < n; ++j) tptr[j + 1] += tptr[j];
        std::vector<int> next(tptr.begin(), tptr.end() - 1);
        for (int i = 0; i < n; ++i) {
            for (int p = ptr[i]; p < ptr[i + 1]; ++p) {
                const int q = next[idx[p]]++;
                tidx[q] = i;
                tval[q] = val[p];
            }
        }
    };
    transpose(l_ptr_, l_idx_, l_val_, lt_ptr_, lt_idx_, lt_val_);
    transpose(u_ptr_, u_idx_, u_val_, ut_ptr_, ut_idx_, ut_val_);
}

ComplexVector IluFactors::solve(const ComplexVector& b, bool adjoint) const {
    if (static_cast<int>(b.size()) != n_)
        throw std::invalid_argument("IluFactors::solve: dimension mismatch");
    ++solve_count_;
    const int n = n_;
    ComplexVector x(b);
    if (!adjoint) {
        // L y = b (unit diagonal), then U x = y.
        for (int i = 0; i < n; ++i) {
            Complex s = x[i];
            for (int p = l_ptr_[i]; p < l_ptr_[i + 1]; ++p)
                s -= l_val_[p] * x[l_idx_[p]];
            x[i] = s;
        }
        for (int i = n - 1; i >= 0; --i) {
            Complex s = x[i];
            const int ud = u_ptr_[i];
            for (int p = ud + 1; p < u_ptr_[i + 1]; ++p)
                s -= u_val_[p] * x[u_idx_[p]];
            x[i] = s / u_val_[ud];
        }
        return x;
    }
    // (L U)^H x = b: U^H z = b (lower, rows of U^H = columns of U), L^H x = z.
    for (int i = 0; i < n; ++i) {
        Complex s = x[i];
        Complex diag = 0.0;
        for (int p = ut_ptr_[i]; p < ut_ptr_[i + 1]; ++p) {
            const int k = ut_idx_[p];
            if (k == i)
                diag = ut_val_[p];
            else
                s -= std::conj(ut_val_[p]) * x[k];
        }
        x[i] = s / std::conj(diag);
    }
    for (int i = n - 1; i >= 0; --i) {
        Complex s = x[i];
        for (int p = lt_ptr_[i]; p < lt_ptr_[i + 1]; ++p)
            s -= std::conj(lt_val_[p]) * x[lt_idx_[p]];
        x[i] = s;
    }
    return x;
}

SparseMatrixCSR IluFactors::lower_unit() const {
    std::vector<std::tuple<int, int, Complex>> trips;
    for (int i = 0; i < n_; ++i) {
        for (int p = l_ptr_[i]; p < l_ptr_[i + 1]; ++p)
            trips.emplace_back(i, l_idx_[p], l_val_[p]);
        trips.emplace_back(i, i, 1.0);
    }
    return SparseMatrixCSR::from_triplets(n_, n_, std::move(trips));
}

SparseMatrixCSR IluFactors::upper() const {
    std::vector<std::tuple<int, int, Complex>> trips;
    for (int i = 0; i < n_; ++i)
        for (int p = u_ptr_[i]; p < u_ptr_[i + 1]; ++p)
            trips.emplace_back(i, u_idx_[p], u_val_[p]);
    return SparseMatrixCSR::from_triplets(n_, n_, std::move(trips));
}

}  // namespace fwi
