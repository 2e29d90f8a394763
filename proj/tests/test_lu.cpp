#include <doctest.h>

#include "support/fixtures.hpp"

using namespace fwi;

namespace {

SparseMatrixCSR random_dd_matrix(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<std::tuple<int, int, Complex>> trips;
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int k = 0; k < 4; ++k) {
            const int j = static_cast<int>(rng() % n);
            if (j == i) continue;
            const Complex v(d(rng), d(rng));
            rowsum += std::abs(v);
            trips.emplace_back(i, j, v);
        }
        trips.emplace_back(i, i, Complex(rowsum + 1.0, d(rng)));
    }
    return SparseMatrixCSR::from_triplets(n, n, std::move(trips));
}

}  // namespace

TEST_CASE("lu of the identity reassembles to the identity") {
    const auto f = lu_factor(SparseMatrixCSR::identity(5));
    CHECK(fixtures::frobenius_rel_diff(SparseMatrixCSR::identity(5), f.reassemble()) == 0.0);
}

TEST_CASE("lu reassembly error is tiny on a 3x3 complex matrix") {
    const auto a = SparseMatrixCSR::from_triplets(
        3, 3,
        {{0, 0, {4, 1}}, {0, 1, {1, 0}}, {1, 0, {0, -1}}, {1, 1, {5, 0}},
         {1, 2, {1, 1}}, {2, 1, {-1, 0}}, {2, 2, {3, -2}}});
    const auto f = lu_factor(a);
    CHECK(fixtures::frobenius_rel_diff(a, f.reassemble()) < 1e-12);
}

TEST_CASE("lu reports a singular pivot for a zero row") {
    const auto a = SparseMatrixCSR::from_triplets(
        3, 3, {{0, 0, 1.0}, {0, 2, 2.0}, {2, 0, 3.0}, {2, 2, 1.0}});  // row 1 empty
    CHECK_THROWS_AS(lu_factor(a), SingularPivotError);
}

TEST_CASE("lu solve recovers a manufactured solution") {
    const auto a = random_dd_matrix(50, 11);
    const auto f = lu_factor(a);
    const auto x0 = fixtures::random_complex(50, 5);
    const auto b = spmv(a, x0);
    const auto x = lu_solve(f, b);
    CHECK(fixtures::rel_err(x, x0) < 1e-10);
    // residual form as well
    const auto r = spmv(a, x);
    ComplexVector diff = r;
    axpy(Complex(-1.0), b, diff);
    CHECK(norm(diff) / norm(b) < 1e-10);
}

TEST_CASE("lu solve of b = 0 returns 0") {
    const auto f = lu_factor(random_dd_matrix(10, 3));
    const auto x = lu_solve(f, ComplexVector(10, 0.0));
    CHECK(norm(x) == 0.0);
}

TEST_CASE("lu adjoint solve satisfies the adjoint identity") {
    const auto a = random_dd_matrix(5, 21);
    const auto f = lu_factor(a);
    for (unsigned s = 0; s < 5; ++s) {
        const auto b = fixtures::random_complex(5, 30 + s);
        const auto c = fixtures::random_complex(5, 40 + s);
        // <A^{-*} b, c> = (A^{-*}b)^* c = b^* A^{-1} c = <b, A^{-1} c>
        // under the conjugate-in-first-argument inner product.
        const Complex lhs = dot(lu_solve(f, b, true), c);
        const Complex rhs = dot(b, lu_solve(f, c));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
    // and the adjoint solve really solves A^H x = b
    const auto b = fixtures::random_complex(5, 55);
    const auto x = lu_solve(f, b, true);
    const auto ax = spmv(a, x, true);
    CHECK(fixtures::rel_err(ax, b) < 1e-12);
}

TEST_CASE("lu reassembly on Helmholtz matrices up to 1e4 rows") {
    for (auto [nx, nz, npml, fhz] : {std::tuple{30, 20, 4, 12.0},
                                     std::tuple{100, 100, 10, 6.0}}) {
        const Grid2D g = build_grid(nx, nz, 10.0, npml);
        const PmlProfile p = make_pml_profile(g, 2000.0);
        const SlownessModel m = fixtures::constant_model(g, 2000.0);
        const auto op = assemble_helmholtz(g, p, m, 2.0 * 3.14159265358979 * fhz);
        const auto f = lu_factor(op.a);
        CHECK(fixtures::frobenius_rel_diff(op.a, f.reassemble()) < 1e-12);
    }
}

TEST_CASE("solve counter counts triangular-solve pairs") {
    const auto f = lu_factor(random_dd_matrix(10, 3));
    f.reset_solve_count();
    const ComplexVector b = fixtures::random_complex(10, 1);
    (void)lu_solve(f, b);
    (void)lu_solve(f, b, true);
    CHECK(f.solve_count() == 2);
}
