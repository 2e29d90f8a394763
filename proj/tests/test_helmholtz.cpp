#include <doctest.h>

#include "support/fixtures.hpp"

using namespace fwi;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("no-PML interior stencil has -1/h^2 couplings and 4/h^2 - w^2 s diagonal") {
    const Grid2D g = build_grid(9, 9, 10.0, 0);
    const PmlProfile p = make_pml_profile(g, 2000.0);
    const double s0 = 1.0 / (2000.0 * 2000.0);
    SlownessModel m;
    m.s.assign(g.num_nodes(), s0);
    const double omega = 2.0 * kPi * 12.0;
    const auto op = assemble_helmholtz(g, p, m, omega);
    const double h2 = 100.0;
    const int c = g.index(4, 4);
    CHECK(op.a.at(c, c).real() == doctest::Approx(4.0 / h2 - omega * omega * s0));
    CHECK(op.a.at(c, c).imag() == 0.0);
    for (int nb : {g.index(3, 4), g.index(5, 4), g.index(4, 3), g.index(4, 5)}) {
        CHECK(op.a.at(c, nb).real() == doctest::Approx(-1.0 / h2));
        CHECK(op.a.at(c, nb).imag() == 0.0);
    }
}

TEST_CASE("no-PML matrix is real and exactly symmetric") {
    const Grid2D g = build_grid(10, 8, 5.0, 0);
    const PmlProfile p = make_pml_profile(g, 1500.0);
    const SlownessModel m = fixtures::constant_model(g, 1500.0);
    const auto op = assemble_helmholtz(g, p, m, 2.0 * kPi * 20.0);
    for (int i = 0; i < op.a.rows; ++i) {
        for (int k = op.a.row_ptr[i]; k < op.a.row_ptr[i + 1]; ++k) {
            const int j = op.a.col_idx[k];
            CHECK(op.a.values[k].imag() == 0.0);
            CHECK(op.a.at(j, i) == op.a.values[k]);
        }
    }
}

TEST_CASE("boundary rows are identity rows with zeroed columns") {
    const Grid2D g = build_grid(8, 8, 5.0, 2);
    const PmlProfile p = make_pml_profile(g, 1500.0);
    const SlownessModel m = fixtures::constant_model(g, 1500.0);
    const auto op = assemble_helmholtz(g, p, m, 2.0 * kPi * 20.0);
    for (int iz = 0; iz < g.nz; ++iz) {
        for (int ix = 0; ix < g.nx; ++ix) {
            if (!g.on_boundary(ix, iz)) continue;
            const int b = g.index(ix, iz);
            CHECK(op.a.row_ptr[b + 1] - op.a.row_ptr[b] == 1);
            CHECK(op.a.at(b, b) == Complex(1.0, 0.0));
        }
    }
    // interior rows never couple into boundary columns
    for (int i = 0; i < op.a.rows; ++i) {
        if (g.on_boundary(g.ix_of(i), g.iz_of(i))) continue;
        for (int k = op.a.row_ptr[i]; k < op.a.row_ptr[i + 1]; ++k) {
            const int j = op.a.col_idx[k];
            if (j != i) CHECK(!g.on_boundary(g.ix_of(j), g.iz_of(j)));
        }
    }
}

TEST_CASE("a PML makes the matrix genuinely complex but keeps it symmetric") {
    const Grid2D g = build_grid(14, 14, 10.0, 4);
    const PmlProfile p = make_pml_profile(g, 2000.0);
    const SlownessModel m = fixtures::constant_model(g, 2000.0);
    const auto op = assemble_helmholtz(g, p, m, 2.0 * kPi * 10.0);
    double imag_norm = 0.0;
    for (const auto& v : op.a.values) imag_norm += v.imag() * v.imag();
    CHECK(imag_norm > 0.0);
    for (int i = 0; i < op.a.rows; ++i)
        for (int k = op.a.row_ptr[i]; k < op.a.row_ptr[i + 1]; ++k)
            CHECK(op.a.at(op.a.col_idx[k], i) == op.a.values[k]);
}

TEST_CASE("the operator is linear in s: (A(s+ds) - A(s)) u = -w^2 (u . ds) without PML") {
    const Grid2D g = build_grid(9, 9, 10.0, 0);
    const PmlProfile p = make_pml_profile(g, 2000.0);
    SlownessModel m = fixtures::constant_model(g, 2000.0);
    const double omega = 2.0 * kPi * 12.0;
    const auto a0 = assemble_helmholtz(g, p, m, omega);
    SlownessModel m2 = m;
    const double ds = 3e-8;
    for (auto& v : m2.s) v += ds;
    const auto a1 = assemble_helmholtz(g, p, m2, omega);
    const auto u = fixtures::random_complex(g.num_nodes(), 42);
    auto lhs = spmv(a1.a, u);
    axpy(Complex(-1.0), spmv(a0.a, u), lhs);
    // Linearity is exact; the evaluation below only carries rounding from the
    // two row sums, bounded by the stencil scale.
    const double row_scale = 8.0 / (g.h * g.h);
    for (int i = 0; i < g.num_nodes(); ++i) {
        const bool bdry = g.on_boundary(g.ix_of(i), g.iz_of(i));
        const Complex want = bdry ? Complex(0.0) : -omega * omega * ds * u[i];
        CHECK(std::abs(lhs[i] - want) <= 1e-14 * row_scale * std::abs(u[i]));
    }
}

TEST_CASE("p block examples") {
    CHECK(norm(spmv(assemble_p_block(ComplexVector(5, 0.0), 3.0),
                    fixtures::random_complex(5, 1))) == 0.0);
    const auto p1 = assemble_p_block(ComplexVector(4, 1.0), 2.0);
    for (int i = 0; i < 4; ++i) CHECK(p1.at(i, i) == Complex(4.0, 0.0));
    const auto u = fixtures::random_complex(6, 3);
    const auto v = fixtures::random_complex(6, 4);
    const auto pv = spmv(assemble_p_block(u, 1.7), v);
    for (int i = 0; i < 6; ++i)
        CHECK(std::abs(pv[i] - 1.7 * 1.7 * u[i] * v[i]) < 1e-15);
}
