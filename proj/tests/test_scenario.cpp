#include "common.hpp"

#include "skinlink/error.hpp"

#include <doctest.h>

#include <sstream>

using namespace skinlink;
using skinlink::testing::baseline;
using skinlink::testing::rel_err;

TEST_CASE("physical constants are self consistent")
{
    const auto k = PhysicalConstants::si();
    CHECK(k.c == 299792458.0);
    CHECK(rel_err(k.eta, std::sqrt(k.mu0 / k.eps0)) < 1e-12);
    CHECK(rel_err(k.c, 1.0 / std::sqrt(k.mu0 * k.eps0)) < 1e-12);
    CHECK(k.eta == doctest::Approx(376.730313668).epsilon(1e-9));
}

TEST_CASE("wavelength")
{
    CHECK(wavelength(27e9) == doctest::Approx(1.1103e-2).epsilon(1e-4));
    CHECK(wavelength(speed_of_light) == 1.0);
    CHECK(wavelength(2.7e9) == doctest::Approx(0.111034).epsilon(1e-6));
    // half-wavelength pitch quoted for 27 GHz assumes c = 3e8
    CHECK(wavelength(27e9) / 2.0 == doctest::Approx(5.556e-3).epsilon(1e-3));
    CHECK_THROWS_AS(wavelength(0.0), Error);
    CHECK_THROWS_AS(wavelength(-1.0), Error);
}

TEST_CASE("decibels")
{
    CHECK(db(1.0) == 0.0);
    CHECK(db(1e-6) == doctest::Approx(-60.0).epsilon(1e-12));
    CHECK(db(1.047e-6) == doctest::Approx(-59.8).epsilon(1e-4));
    CHECK(from_db(db(0.37)) == doctest::Approx(0.37).epsilon(1e-14));
    try {
        db(0.0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
    CHECK_THROWS_AS(db(-2.0), Error);
}

TEST_CASE("scenario geometry follows the specular-plane convention")
{
    const auto s = baseline();
    CHECK(s.phi_tx == pi);
    CHECK(s.phi_rx == 0.0);
    const Vec3 tx = s.tx_position();
    const Vec3 rx = s.rx_position();
    CHECK(tx.x == doctest::Approx(-15.0 * 0.5));
    CHECK(tx.y == 0.0);
    CHECK(tx.z == doctest::Approx(15.0 * std::sqrt(3.0) / 2.0));
    CHECK(rx.x == doctest::Approx(7.5));
    CHECK(rx.y == 0.0);
    CHECK(rx.z == doctest::Approx(tx.z));
    CHECK(s.lambda == wavelength(27e9));
    CHECK(s.default_pitch() == s.lambda / 2.0);
}

TEST_CASE("scenario validation")
{
    CHECK_THROWS_AS(LinkScenario::make(27e9, 0.1, 1.0, 1.0, 15.0, 15.0, pi / 2.0), Error);
    CHECK_THROWS_AS(LinkScenario::make(27e9, 0.1, 1.0, 1.0, 15.0, 15.0, -0.1), Error);
    CHECK_THROWS_AS(LinkScenario::make(27e9, 0.0, 1.0, 1.0, 15.0, 15.0, 0.1), Error);
    CHECK_THROWS_AS(LinkScenario::make(27e9, 0.1, 0.0, 1.0, 15.0, 15.0, 0.1), Error);
    CHECK_THROWS_AS(LinkScenario::make(27e9, 0.1, 1.0, 1.0, 0.0, 15.0, 0.1), Error);
    CHECK_THROWS_AS(LinkScenario::make(27e9, 0.1, 1.0, 1.0, 15.0, -1.0, 0.1), Error);
    CHECK_NOTHROW(LinkScenario::make(27e9, 0.1, 1.0, 1.0, 15.0, 15.0, 0.0));
}

TEST_CASE("incident field magnitude at the panel center")
{
    const auto s = baseline();
    const FieldSample f = incident_field(s, {0.0, 0.0, 0.0});
    const double g = std::pow(10.0, 1.54);
    // sqrt(eta/(2 pi)) is sqrt(60) to 0.04 %
    CHECK(norm(f.e) == doctest::Approx(std::sqrt(60.0 * g * 0.1) / 15.0).epsilon(5e-4));
    const double eta = free_space_impedance();
    CHECK(rel_err(norm(f.e), std::sqrt(eta * g * 0.1 / (2.0 * pi)) / 15.0) < 1e-12);
    CHECK(f.e.x == cd{});
    CHECK(f.e.z == cd{});
}

TEST_CASE("incident field spherical spreading and wavefront")
{
    const auto s = baseline();
    auto far = s;
    far.r_tx = 30.0;
    const double e1 = norm(incident_field(s, {}).e);
    const double e2 = norm(incident_field(far, {}).e);
    CHECK(rel_err(e2, e1 / 2.0) < 1e-12);
    CHECK(rel_err(e2 * 30.0, e1 * 15.0) < 1e-12);

    // mirror points about the incidence plane are equidistant from the source
    const auto a = incident_field(s, {0.13, 0.21, 0.0});
    const auto b = incident_field(s, {0.13, -0.21, 0.0});
    CHECK(std::abs(std::arg(a.e.y) - std::arg(b.e.y)) < 1e-12);
}

TEST_CASE("incident field impedance and power density")
{
    const auto s = baseline();
    const double eta = free_space_impedance();
    for (const Vec3 p : {Vec3{0, 0, 0}, Vec3{0.4, -0.3, 0}, Vec3{-0.5, 0.5, 0}}) {
        const auto f = incident_field(s, p);
        const Vec3 khat = (1.0 / norm(p - s.tx_position())) * (p - s.tx_position());
        // only the part of E_y transverse to k drives H
        CHECK(rel_err(norm(f.e) * std::hypot(khat.x, khat.z), eta * norm(f.h)) < 1e-10);
        if (p.y == 0.0) CHECK(rel_err(norm(f.e), eta * norm(f.h)) < 1e-10);
        CHECK(std::abs(dot(f.h, khat)) < 1e-15);
    }
    // boresight power density
    for (double d : {1.0, 15.0, 120.0}) {
        auto t = s;
        t.r_tx = d;
        const auto f = incident_field(t, {});
        const double lhs = std::pow(norm(f.e), 2) / (2.0 * eta);
        const double rhs = t.g_tx * t.p_tx / (4.0 * pi * d * d);
        CHECK(rel_err(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("incident field rejects the source location")
{
    LinkScenario s = baseline();
    s.theta0 = pi / 2.0;  // bypasses validation on purpose
    const Vec3 tx = s.tx_position();
    try {
        incident_field(s, {tx.x, 0.0, 0.0});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::singular_geometry);
    }
    CHECK_THROWS_AS(incident_field(baseline(), {0.0, 0.0, 0.1}), Error);
}

TEST_CASE("scenario config parsing")
{
    std::istringstream in(
        "# baseline link\n"
        "f_hz = 27e9\n"
        "p_tx_w = 0.1\n"
        "g_tx_dbi = 15.4\n"
        "g_rx_dbi = 15.4   # horn\n"
        "r_tx_m = 15\n"
        "r_rx_m = 15\n"
        "theta0_deg = 30\n"
        "\n");
    const auto s = parse_scenario(in);
    CHECK(s.f == 27e9);
    CHECK(s.g_tx == doctest::Approx(from_db(15.4)));
    CHECK(s.theta0 == doctest::Approx(pi / 6.0));
    CHECK_FALSE(s.pitch.has_value());

    std::istringstream with_pitch("f_hz=27e9\np_tx_w=1\ng_tx_dbi=0\ng_rx_dbi=0\nr_tx_m=1\nr_rx_m=2\n"
                                  "theta0_deg=0\ndelta_m=5.556e-3\n");
    CHECK(parse_scenario(with_pitch).default_pitch() == 5.556e-3);

    std::istringstream typo("f_hz = 27e9\np_tx_w = 0.1\ng_tx_db = 15.4\n");
    try {
        parse_scenario(typo, "link.cfg");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(std::string(e.what()).find("link.cfg:3") != std::string::npos);
        CHECK(std::string(e.what()).find("g_tx_db") != std::string::npos);
    }

    std::istringstream missing("f_hz = 27e9\n");
    CHECK_THROWS_AS(parse_scenario(missing), Error);
    std::istringstream garbage("f_hz = 27e9\np_tx_w = abc\n");
    CHECK_THROWS_AS(parse_scenario(garbage), Error);
    std::istringstream dup("f_hz = 27e9\nf_hz = 28e9\n");
    CHECK_THROWS_AS(parse_scenario(dup), Error);
    std::istringstream nosep("f_hz 27e9\n");
    CHECK_THROWS_AS(parse_scenario(nosep), Error);
}

TEST_CASE("scenario text form round-trips")
{
    auto s = baseline(50.0, 25.5, 45.0);
    s.pitch = 5.556e-3;
    std::istringstream in(format_scenario(s));
    const auto t = parse_scenario(in);
    CHECK(t.f == s.f);
    CHECK(t.g_tx == doctest::Approx(s.g_tx).epsilon(1e-14));
    CHECK(t.r_rx == s.r_rx);
    CHECK(t.theta0 == doctest::Approx(s.theta0).epsilon(1e-14));
    CHECK(t.pitch == s.pitch);
    const LinkScenario copy = s;
    CHECK(scenario_hash(copy) == scenario_hash(s));
    CHECK(scenario_hash(t).size() == 16);
    CHECK(scenario_hash(baseline()) != scenario_hash(s));
}
