#include "common.hpp"

#include "skinlink/error.hpp"
#include "skinlink/sheet.hpp"

#include <doctest.h>

#include <vector>

using namespace skinlink;
using skinlink::testing::baseline;
using skinlink::testing::rel_err;

TEST_CASE("midpoint cell fields equal the incident field at the barycenter")
{
    const auto s = baseline();
    const auto grid = discretize(0.05, s.default_pitch());
    const auto inc = cell_incident_fields(grid, s, CellAverage::midpoint);
    REQUIRE(inc.size() == grid.cells());
    for (std::size_t q = 0; q < grid.q_count; q += 3)
        for (std::size_t p = 0; p < grid.p_count; p += 2) {
            const auto f = incident_field(s, {grid.x(p), grid.y(q), 0.0});
            const auto& c = inc[grid.index(p, q)];
            CHECK(c.e_y == f.e.y);
            CHECK(c.h_x == f.h.x);
            CHECK(c.e_x == f.e.x);
            CHECK(c.h_y == f.h.y);
        }
}

TEST_CASE("gauss cell average stays close to the midpoint value")
{
    const auto s = baseline();
    const auto grid = discretize(0.05, s.default_pitch());
    const auto mid = cell_incident_fields(grid, s, CellAverage::midpoint);
    const auto gau = cell_incident_fields(grid, s, CellAverage::gauss2x2);
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        CHECK(std::abs(gau[i].e_y - mid[i].e_y) / std::abs(mid[i].e_y) < 0.2);
        CHECK(gau[i].e_y != mid[i].e_y);
    }
}

TEST_CASE("sheet currents in the conductor and magnetic-wall limits")
{
    const auto s = baseline();
    const auto grid = discretize(0.03, s.default_pitch());
    const auto inc = cell_incident_fields(grid, s, CellAverage::midpoint);
    const std::vector<ReflectionTensor> pec(grid.cells(), ReflectionTensor{-1.0, -1.0});
    const auto c = sheet_currents(grid, pec, inc);
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        CHECK(c.jm_x[i] == cd{});
        CHECK(c.jm_y[i] == cd{});
        // 2 n x H with n = z
        CHECK(c.je_x[i] == -2.0 * inc[i].h_y);
        CHECK(c.je_y[i] == 2.0 * inc[i].h_x);
    }
    const std::vector<ReflectionTensor> pmc(grid.cells(), ReflectionTensor{1.0, 1.0});
    const auto m = sheet_currents(grid, pmc, inc);
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        CHECK(m.je_x[i] == cd{});
        CHECK(m.je_y[i] == cd{});
        CHECK(m.jm_x[i] == 2.0 * inc[i].e_y);
        CHECK(m.jm_y[i] == -2.0 * inc[i].e_x);
    }
    CHECK_THROWS_AS(sheet_currents(grid, std::vector<ReflectionTensor>(3), inc), Error);
}

TEST_CASE("normal incidence conductor current magnitude")
{
    auto s = LinkScenario::make(27e9, 1.0, 10.0, 10.0, 5.0, 5.0, 0.0);
    const auto grid = discretize(0.02, s.default_pitch());
    const auto inc = cell_incident_fields(grid, s, CellAverage::midpoint);
    const std::vector<ReflectionTensor> pec(grid.cells());
    const auto c = sheet_currents(grid, pec, inc);
    const double eta = free_space_impedance();
    const auto center = incident_field(s, {0.0, 0.0, 0.0});
    CHECK(rel_err(std::abs(c.je_y[grid.index(grid.p_count / 2, grid.q_count / 2)]),
                  2.0 * norm(center.e) / eta) < 1e-12);
    for (std::size_t i = 0; i < grid.cells(); ++i) CHECK(c.je_x[i] == cd{});
}

TEST_CASE("susceptibility map reproduces the sheet currents")
{
    // plane-wave incidence at a single point: H_x = cos(theta) E_y / eta
    const double eta = free_space_impedance();
    const double f = 27e9;
    const double k = 2.0 * pi / wavelength(f);
    const double omega = 2.0 * pi * f;
    const auto kc = PhysicalConstants::si();
    const double ct = std::cos(0.6);
    const cd e_y{0.3, -0.8};
    const cd h_x = ct * e_y / eta;
    for (const cd gamma : {cd{0.2, 0.9}, cd{-0.5, 0.1}, cd{0.99, 0.0}, cd{std::polar(1.0, 2.7)}}) {
        const auto sus = susceptibility_from_gamma(gamma, k, ct);
        const cd e_av = 0.5 * (1.0 + gamma) * e_y;
        const cd h_av = 0.5 * (1.0 - gamma) * h_x;
        const cd je = cd{0.0, omega * kc.eps0} * sus.sigma_e * e_av;
        const cd jm = cd{0.0, omega * kc.mu0} * sus.sigma_m * h_av;
        CHECK(std::abs(je - 2.0 * h_av) < 1e-12 * std::abs(h_x));
        CHECK(std::abs(jm - 2.0 * e_av) < 1e-12 * std::abs(e_y));
        CHECK(std::abs(gamma_from_susceptibility(sus.sigma_e, k, ct) - gamma) < 1e-12);
    }
    CHECK_THROWS_AS(susceptibility_from_gamma(cd{-1.0, 0.0}, k, ct), Error);
    CHECK_THROWS_AS(susceptibility_from_gamma(cd{1.0, 0.0}, k, ct), Error);
}

TEST_CASE("fresnel check")
{
    const auto s = baseline();
    CHECK_NOTHROW(check_fresnel(discretize(0.8, s.default_pitch()), s, true));
    CHECK_NOTHROW(check_fresnel(discretize(1.2, s.default_pitch()), s, false));
    try {
        check_fresnel(discretize(1.2, s.default_pitch()), s, true);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validity);
    }
}
