#include "common.hpp"

#include "skinlink/analysis.hpp"
#include "skinlink/pcs_model.hpp"

#include <doctest.h>

using namespace skinlink;
using skinlink::testing::baseline;
using skinlink::testing::rel_err;

TEST_CASE("conductor currents carry no magnetic part")
{
    const auto s = baseline();
    const PcsPanel panel{discretize(0.2, s.default_pitch())};
    const auto c = pcs_currents(panel, s);
    for (std::size_t i = 0; i < panel.grid.cells(); ++i) {
        CHECK(c.jm_x[i] == cd{});
        CHECK(c.jm_y[i] == cd{});
        CHECK(std::abs(c.je_y[i]) > 0.0);
    }
}

TEST_CASE("conductor current phase follows the incident wavefront")
{
    const auto s = baseline();
    const PcsPanel panel{discretize(21 * s.default_pitch(), s.default_pitch(), CellOrigin::centered)};
    const auto& g = panel.grid;
    const auto c = pcs_currents(panel, s);
    const std::size_t mid = g.index(10, 10);
    REQUIRE(g.x(10) == doctest::Approx(0.0));
    const Vec3 tx = s.tx_position();
    const double d0 = norm(Vec3{0, 0, 0} - tx);
    for (std::size_t q = 0; q < g.q_count; q += 4)
        for (std::size_t p = 0; p < g.p_count; p += 3) {
            const double d = norm(Vec3{g.x(p), g.y(q), 0.0} - tx);
            const double got = std::arg(c.je_y[g.index(p, q)]) - std::arg(c.je_y[mid]);
            const double want = -s.wavenumber() * (d - d0);
            CHECK(std::abs(wrap_phase(got - want)) < 1e-9);
        }
}

TEST_CASE("conductor TPA is a ratio")
{
    auto a = baseline();
    auto b = a.with_p_tx(10.0);
    const double ta = pcs_tpa(a, 0.3);
    const double tb = pcs_tpa(b, 0.3);
    CHECK(rel_err(ta, tb) < 1e-12);
    CHECK(ta > 0.0);
    CHECK(ta < 1.0);
}

TEST_CASE("conductor TPA at the baseline aperture")
{
    const auto s = baseline();
    const double a = db(pcs_tpa(s, 0.8));
    CHECK(a >= -63.5 - 1.5);
    CHECK(a <= -63.5 + 1.5);
}

TEST_CASE("small conductor tracks the ideal bound")
{
    const auto s = baseline();
    const double pcs = db(pcs_tpa(s, 0.15));
    const double opt = db(ems_upper_bound_tpa(s, discretize(0.15, s.default_pitch()).side_l));
    CHECK(std::abs(pcs - opt) <= 1.0);
}

TEST_CASE("infinite conductor asymptote")
{
    const auto s = baseline();
    CHECK(std::abs(db(pcs_asymptotic_tpa(s)) + 59.8) <= 0.05);
    CHECK(pcs_asymptotic_tpa(s.with_theta0(deg_to_rad(60.0))) == pcs_asymptotic_tpa(s));
    auto h = s;
    h.g_tx /= 2.0;
    h.g_rx /= 2.0;
    CHECK(db(pcs_asymptotic_tpa(h)) - db(pcs_asymptotic_tpa(s)) == doctest::Approx(-6.0206).epsilon(1e-4));
}

TEST_CASE("specular peaking of a moderate conductor")
{
    const double lambda = wavelength(27e9);
    const double side = 64 * lambda / 2.0;
    const auto s = LinkScenario::make(27e9, 1.0, 10.0, 10.0, 100.0 * side, 100.0 * side,
                                      deg_to_rad(30.0));
    const PcsPanel panel{discretize(side, s.default_pitch())};
    REQUIRE(panel.grid.p_count == 64);
    const auto c = pcs_currents(panel, s);
    double best = -1.0;
    double best_theta = -1.0;
    for (int i = 0; i <= 890; ++i) {
        const double th = deg_to_rad(0.1 * i);
        const double m = scattered_field(c, {s.r_rx, th, 0.0}, s.lambda, free_space_impedance()).magnitude();
        if (m > best) {
            best = m;
            best_theta = th;
        }
    }
    CHECK(std::abs(rad_to_deg(best_theta) - 30.0) <= 2.0);
}

TEST_CASE("finite conductor can beat the infinite asymptote")
{
    const auto s = baseline();
    bool exceeded = false;
    for (double l = 0.1; l <= 1.0 + 1e-9; l += 0.05)
        exceeded = exceeded || pcs_tpa(s, l) > pcs_asymptotic_tpa(s);
    CHECK(exceeded);
}

TEST_CASE("conductor TPA grows with small apertures")
{
    const auto s = baseline();
    const double limit = l_threshold(s) / 2.0;
    double previous = 0.0;
    for (std::size_t n = 1; n * s.default_pitch() <= limit; ++n) {
        const double a = pcs_tpa(s, n * s.default_pitch());
        CHECK(a > previous);
        previous = a;
    }
}
