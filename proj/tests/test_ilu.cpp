#include <doctest.h>

#include <limits>

#include "support/fixtures.hpp"

using namespace fwi;

namespace {

SparseMatrixCSR tridiag(int n) {
    std::vector<std::tuple<int, int, Complex>> trips;
    for (int i = 0; i < n; ++i) {
        trips.emplace_back(i, i, Complex(2.0, 0.3));
        if (i > 0) trips.emplace_back(i, i - 1, -1.0);
        if (i + 1 < n) trips.emplace_back(i, i + 1, -1.0);
    }
    return SparseMatrixCSR::from_triplets(n, n, std::move(trips));
}

SparseMatrixCSR laplacian_5pt(int nx, int nz) {
    const Grid2D g = build_grid(nx, nz, 1.0, 0);
    std::vector<std::tuple<int, int, Complex>> trips;
    for (int iz = 0; iz < nz; ++iz) {
        for (int ix = 0; ix < nx; ++ix) {
            const int n0 = g.index(ix, iz);
            trips.emplace_back(n0, n0, 4.0);
            if (ix > 0) trips.emplace_back(n0, g.index(ix - 1, iz), -1.0);
            if (ix + 1 < nx) trips.emplace_back(n0, g.index(ix + 1, iz), -1.0);
            if (iz > 0) trips.emplace_back(n0, g.index(ix, iz - 1), -1.0);
            if (iz + 1 < nz) trips.emplace_back(n0, g.index(ix, iz + 1), -1.0);
        }
    }
    return SparseMatrixCSR::from_triplets(nx * nz, nx * nz, std::move(trips));
}

// || A - L U ||_F via a dense product (test sizes only).
double factorization_residual(const SparseMatrixCSR& a, const IluFactors& f) {
    const int n = a.rows;
    const auto l = f.lower_unit();
    const auto u = f.upper();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        ComplexVector row(n, 0.0);
        for (int p = l.row_ptr[i]; p < l.row_ptr[i + 1]; ++p) {
            const int k = l.col_idx[p];
            const Complex lv = l.values[p];
            for (int q = u.row_ptr[k]; q < u.row_ptr[k + 1]; ++q)
                row[u.col_idx[q]] += lv * u.values[q];
        }
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
            row[a.col_idx[p]] -= a.values[p];
        for (const auto& v : row) acc += std::norm(v);
    }
    return std::sqrt(acc);
}

}  // namespace

TEST_CASE("ilu(0) of a tridiagonal matrix is the exact factorization") {
    const auto a = tridiag(12);
    const auto f = ilu_factor(a, 0);
    const auto lu = lu_factor(a);
    const auto b = fixtures::random_complex(12, 9);
    CHECK(fixtures::rel_err(ilu_solve(f, b), lu_solve(lu, b)) < 1e-12);
    CHECK(factorization_residual(a, f) < 1e-12);
}

TEST_CASE("ilu with large fill matches the exact solve on a 10x10 Laplacian") {
    const auto a = laplacian_5pt(10, 10);
    const auto f = ilu_factor(a, a.rows);  // beyond the exact fill level
    const auto lu = lu_factor(a);
    const auto b = fixtures::random_complex(a.rows, 17);
    CHECK(fixtures::rel_err(ilu_solve(f, b), lu_solve(lu, b)) < 1e-10);
    CHECK(factorization_residual(a, f) < 1e-10);
}

TEST_CASE("ilu(0) keeps exactly the input pattern") {
    const auto a = laplacian_5pt(6, 5);
    const auto f = ilu_factor(a, 0);
    const auto l = f.lower_unit();
    const auto u = f.upper();
    for (int i = 0; i < a.rows; ++i) {
        std::vector<int> cols;
        for (int p = l.row_ptr[i]; p < l.row_ptr[i + 1]; ++p)
            if (l.col_idx[p] != i) cols.push_back(l.col_idx[p]);
        for (int p = u.row_ptr[i]; p < u.row_ptr[i + 1]; ++p) cols.push_back(u.col_idx[p]);
        std::vector<int> acols(a.col_idx.begin() + a.row_ptr[i],
                               a.col_idx.begin() + a.row_ptr[i + 1]);
        CHECK(cols == acols);
    }
}

TEST_CASE("ilu residual is non-increasing in the fill level on Helmholtz") {
    const Grid2D g = build_grid(16, 16, 10.0, 3);
    const PmlProfile p = make_pml_profile(g, 2000.0);
    const SlownessModel m = fixtures::constant_model(g, 2000.0);
    const auto op = assemble_helmholtz(g, p, m, 2.0 * 3.14159265358979 * 12.0);
    double prev = std::numeric_limits<double>::infinity();
    for (int level : {0, 1, 2, 4}) {
        const double res = factorization_residual(op.a, ilu_factor(op.a, level));
        CHECK(res <= prev * (1.0 + 1e-12));
        prev = res;
    }
}

TEST_CASE("ilu zero pivot reports the row and a shift can rescue it") {
    // Structurally usable diagonal that cancels exactly at elimination time:
    // [[1, 1], [1, 1]] -> U(1,1) = 0.
    const auto a = SparseMatrixCSR::from_triplets(
        2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
    try {
        (void)ilu_factor(a, 0);
        FAIL("expected ZeroPivotError");
    } catch (const ZeroPivotError& e) {
        CHECK(e.index == 1);
    }
    CHECK_NOTHROW(ilu_factor(a, 0, /*diag_shift=*/0.5));
    // A structurally missing diagonal is rejected up front.
    const auto bad = SparseMatrixCSR::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
    CHECK_THROWS_AS(ilu_factor(bad, 0), std::invalid_argument);
}

TEST_CASE("ilu adjoint solve is consistent with the exact adjoint at full fill") {
    const auto a = tridiag(9);
    const auto f = ilu_factor(a, a.rows);
    const auto lu = lu_factor(a);
    const auto b = fixtures::random_complex(9, 77);
    CHECK(fixtures::rel_err(ilu_solve(f, b, true), lu_solve(lu, b, true)) < 1e-10);
}

TEST_CASE("ilu solve of b = 0 returns 0") {
    const auto f = ilu_factor(tridiag(6), 1);
    CHECK(norm(ilu_solve(f, ComplexVector(6, 0.0))) == 0.0);
}
