#include <doctest.h>

#include "support/fixtures.hpp"

using namespace fwi;

TEST_CASE("from_triplets sorts and sums duplicates") {
    const SparseMatrixCSR a = SparseMatrixCSR::from_triplets(
        2, 3, {{1, 2, {1, 0}}, {0, 1, {0, 1}}, {1, 2, {2, 0}}, {0, 0, {5, 0}}});
    CHECK(a.nnz() == 3);
    CHECK(a.at(0, 0) == Complex(5, 0));
    CHECK(a.at(0, 1) == Complex(0, 1));
    CHECK(a.at(1, 2) == Complex(3, 0));
    CHECK(a.at(1, 0) == Complex(0, 0));
    for (int i = 0; i < a.rows; ++i)
        for (int k = a.row_ptr[i] + 1; k < a.row_ptr[i + 1]; ++k)
            CHECK(a.col_idx[k] > a.col_idx[k - 1]);
}

TEST_CASE("spmv identity and zero") {
    const auto id = SparseMatrixCSR::identity(3);
    const ComplexVector x = {{1, 2}, {3, 0}, {0, -1}};
    CHECK(spmv(id, x) == x);
    const SparseMatrixCSR zero = SparseMatrixCSR::from_triplets(3, 3, {});
    for (const auto& v : spmv(zero, x)) CHECK(v == Complex(0, 0));
}

TEST_CASE("spmv forward and adjoint on a hand-evaluated matrix") {
    // A = [[0, i], [0, 0]]
    const SparseMatrixCSR a = SparseMatrixCSR::from_triplets(2, 2, {{0, 1, {0, 1}}});
    const ComplexVector x = {1.0, 1.0};
    const auto y = spmv(a, x);
    CHECK(y[0] == Complex(0, 1));
    CHECK(y[1] == Complex(0, 0));
    const auto z = spmv(a, x, /*adjoint=*/true);
    CHECK(z[0] == Complex(0, 0));
    CHECK(z[1] == Complex(0, -1));
}

TEST_CASE("spmv rejects dimension mismatches") {
    const auto id = SparseMatrixCSR::identity(3);
    const ComplexVector x(2, 0.0);
    CHECK_THROWS_AS(spmv(id, x), std::invalid_argument);
    CHECK_THROWS_AS(spmv(id, x, true), std::invalid_argument);
}

TEST_CASE("spmv adjoint identity <Ax,y> = <x,A*y> on random data") {
    std::vector<std::tuple<int, int, Complex>> trips;
    std::mt19937 rng(7);
    std::normal_distribution<double> d(0.0, 1.0);
    for (int k = 0; k < 60; ++k)
        trips.emplace_back(rng() % 8, rng() % 8, Complex(d(rng), d(rng)));
    const auto a = SparseMatrixCSR::from_triplets(8, 8, std::move(trips));
    for (unsigned s = 0; s < 5; ++s) {
        const auto x = fixtures::random_complex(8, 100 + s);
        const auto y = fixtures::random_complex(8, 200 + s);
        const Complex lhs = dot(spmv(a, x), y);
        const Complex rhs = dot(x, spmv(a, y, true));
        CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(lhs)));
    }
}
