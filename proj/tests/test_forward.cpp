#include <doctest.h>

#include "support/fixtures.hpp"

using namespace fwi;

namespace {
constexpr double kPi = 3.14159265358979323846;

struct Setup {
    Grid2D grid;
    PmlProfile profile;
    SlownessModel model;
    LuFactors lu;
};

Setup homogeneous(int nx, int nz, int npml, double fhz) {
    const Grid2D g = build_grid(nx, nz, 10.0, npml);
    const PmlProfile p = make_pml_profile(g, 2000.0);
    const SlownessModel m = fixtures::constant_model(g, 2000.0);
    auto op = assemble_helmholtz(g, p, m, 2.0 * kPi * fhz);
    return {g, p, m, LuFactors::factor(op.a)};
}

}  // namespace

TEST_CASE("zero source amplitude gives a zero field") {
    auto su = homogeneous(15, 15, 3, 10.0);
    Survey s;
    s.frequencies_hz = {10.0};
    Survey::Source src;
    src.ix = 7;
    src.iz = 7;
    src.amplitude = 0.0;
    src.receivers = {{5, 5}};
    s.sources = {src};
    const auto u = solve_forward(su.lu, su.grid, s);
    CHECK(norm(u.per_source[0]) == 0.0);
}

TEST_CASE("homogeneous field is symmetric about the source column") {
    auto su = homogeneous(15, 15, 3, 10.0);
    Survey s;
    s.frequencies_hz = {10.0};
    Survey::Source src;
    src.ix = 7;  // center column of a 15-wide grid
    src.iz = 7;
    src.receivers = {{5, 5}};
    s.sources = {src};
    const auto u = solve_forward(su.lu, su.grid, s).per_source[0];
    for (int iz = 0; iz < su.grid.nz; ++iz) {
        for (int dx = 1; dx <= 7; ++dx) {
            const Complex a = u[su.grid.index(7 - dx, iz)];
            const Complex b = u[su.grid.index(7 + dx, iz)];
            CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("forward solve residual is tiny on a 50x50 grid") {
    auto su = homogeneous(50, 50, 8, 8.0);
    Survey s;
    s.frequencies_hz = {8.0};
    Survey::Source src;
    src.ix = 25;
    src.iz = 25;
    src.receivers = {{20, 20}};
    s.sources = {src};
    const auto u = solve_forward(su.lu, su.grid, s).per_source[0];
    const auto op = assemble_helmholtz(su.grid, su.profile, su.model, 2.0 * kPi * 8.0);
    ComplexVector f(su.grid.num_nodes(), 0.0);
    f[su.grid.index(25, 25)] = 1.0 / (su.grid.h * su.grid.h);
    auto r = spmv(op.a, u);
    axpy(Complex(-1.0), f, r);
    CHECK(norm(r) / norm(f) < 1e-10);
    // Dirichlet ring is exactly zero.
    for (int i = 0; i < su.grid.num_nodes(); ++i)
        if (su.grid.on_boundary(su.grid.ix_of(i), su.grid.iz_of(i)))
            CHECK(u[i] == Complex(0.0, 0.0));
}

TEST_CASE("observe samples, errors outside the core, and its adjoint scatters") {
    const Grid2D g = build_grid(10, 10, 1.0, 2);
    Survey s;
    s.frequencies_hz = {5.0};
    Survey::Source src;
    src.ix = 4;
    src.iz = 4;
    src.receivers = {{3, 3}, {5, 6}};
    s.sources = {src};

    Wavefield u;
    u.per_source = {ComplexVector(g.num_nodes(), 1.0)};
    const auto d = observe(g, s, u);
    CHECK(d.size() == 2);
    CHECK(d[0] == Complex(1.0));
    CHECK(d[1] == Complex(1.0));

    u.per_source[0] = fixtures::random_complex(g.num_nodes(), 3);
    const auto d2 = observe(g, s, u);
    CHECK(d2[0] == u.per_source[0][g.index(3, 3)]);

    Survey bad = s;
    bad.sources[0].receivers = {{1, 1}};  // inside the PML frame
    CHECK_THROWS_AS(observe(g, bad, u), std::invalid_argument);

    // adjoint identity <Q u, w> = <u, Q^* w>
    const auto w = fixtures::random_complex(2, 9);
    const Complex lhs = dot(observe(g, s, u), w);
    const auto qw = observe_adjoint(g, s, w);
    const Complex rhs = dot(u.per_source[0], qw.per_source[0]);
    CHECK(std::abs(lhs - rhs) < 1e-13 * std::abs(lhs));
}

TEST_CASE("Q Q^* is the identity on data space for distinct receivers") {
    const Grid2D g = build_grid(10, 10, 1.0, 2);
    Survey s;
    s.frequencies_hz = {5.0};
    Survey::Source src;
    src.ix = 4;
    src.iz = 4;
    src.receivers = {{3, 3}, {4, 5}, {6, 6}};
    s.sources = {src};
    const auto w = fixtures::random_complex(3, 5);
    const auto round = observe(g, s, observe_adjoint(g, s, w));
    CHECK(fixtures::rel_err(round, w) == 0.0);
}

TEST_CASE("residual and misfit definitions") {
    const DataVector a = {{1, 1}, {0, 0}};
    const DataVector b = {{1, 0}, {0, 0}};
    const auto r = residual(a, b);
    CHECK(r[0] == Complex(0, 1));
    CHECK(r[1] == Complex(0, 0));
    CHECK(norm(residual(a, a)) == 0.0);
    CHECK_THROWS_AS(residual(a, DataVector{1.0}), std::invalid_argument);
    CHECK(relative_misfit(b, a) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("weights: identity, zero offset, proportionality, unit maximum") {
    Survey s;
    s.frequencies_hz = {5.0};
    Survey::Source src;
    src.ix = 10;
    src.iz = 10;
    src.receivers = {{10, 10}, {13, 14}, {16, 18}};  // offsets 0, 5, 10
    s.sources = {src};
    const auto wi = build_weights(s, WeightMode::identity);
    for (double v : wi.w) CHECK(v == 1.0);
    const auto wo = build_weights(s, WeightMode::offset);
    CHECK(wo.w[0] == 0.0);
    CHECK(wo.w[1] == doctest::Approx(0.5));
    CHECK(wo.w[2] == 1.0);
}

TEST_CASE("PML absorbs: field near the outer ring is far below the core maximum") {
    auto su = homogeneous(60, 60, 10, 8.0);
    Survey s;
    s.frequencies_hz = {8.0};
    Survey::Source src;
    src.ix = 30;
    src.iz = 30;
    src.receivers = {{25, 25}};
    s.sources = {src};
    const auto u = solve_forward(su.lu, su.grid, s).per_source[0];
    double core_max = 0.0, outer_max = 0.0, inner_ring_max = 0.0;
    const Grid2D& g = su.grid;
    for (int iz = 0; iz < g.nz; ++iz) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const double m = std::abs(u[g.index(ix, iz)]);
            if (g.in_core(ix, iz)) core_max = std::max(core_max, m);
            if (g.on_boundary(ix, iz)) outer_max = std::max(outer_max, m);
            if (ix == 1 || iz == 1 || ix == g.nx - 2 || iz == g.nz - 2)
                inner_ring_max = std::max(inner_ring_max, m);
        }
    }
    CHECK(outer_max < 1e-2 * core_max);
    // the deepest interior ring has been damped by roughly the one-way target
    CHECK(inner_ring_max < 5e-2 * core_max);
}

TEST_CASE("survey validation rejects bad geometry") {
    const Grid2D g = build_grid(10, 10, 1.0, 2);
    Survey s;
    s.frequencies_hz = {5.0};
    CHECK_THROWS_AS(s.validate(g), std::invalid_argument);  // no sources
    Survey::Source src;
    src.ix = 1;
    src.iz = 4;  // in the PML frame
    s.sources = {src};
    CHECK_THROWS_AS(s.validate(g, false), std::invalid_argument);
    s.sources[0].ix = 4;
    CHECK_THROWS_AS(s.validate(g), std::invalid_argument);  // no receivers
    CHECK_NOTHROW(s.validate(g, false));
}
