#pragma once

#include "skinlink/vec.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>

namespace skinlink {

struct PhysicalConstants {
    double c;     // m/s
    double eps0;  // F/m
    double mu0;   // H/m
    double eta;   // ohm

    static PhysicalConstants si();
};

inline constexpr double speed_of_light = 299792458.0;
inline constexpr double pi = std::numbers::pi;

double free_space_impedance();

double wavelength(double f_hz);

double db(double ratio);
double from_db(double decibels);
double deg_to_rad(double deg);
double rad_to_deg(double rad);

// shortest text that parses back to the same double
std::string format_double(double v);

struct LinkScenario {
    double f = 0.0;
    double lambda = 0.0;
    double p_tx = 0.0;
    double g_tx = 0.0;
    double g_rx = 0.0;
    double r_tx = 0.0;
    double r_rx = 0.0;
    double theta0 = 0.0;
    double phi_tx = pi;
    double phi_rx = 0.0;
    // cell pitch override; lambda/2 when unset
    std::optional<double> pitch;

    // gains linear, angles radians
    static LinkScenario make(double f_hz, double p_tx_w, double g_tx, double g_rx,
                             double r_tx_m, double r_rx_m, double theta0_rad);

    void validate() const;

    double wavenumber() const { return 2.0 * pi / lambda; }
    double default_pitch() const { return pitch ? *pitch : lambda / 2.0; }
    Vec3 tx_position() const;
    Vec3 rx_position() const;

    LinkScenario with_theta0(double theta0_rad) const;
    LinkScenario with_r_rx(double r_rx_m) const;
    LinkScenario with_rho(double rho_m) const;
    LinkScenario with_p_tx(double p_tx_w) const;
};

struct FieldSample {
    CVec3 e;
    CVec3 h;
};

FieldSample incident_field(const LinkScenario& scenario, const Vec3& p);

// flat "key = value" text, '#' starts a comment
LinkScenario parse_scenario(std::istream& in, const std::string& source_name = "<stream>");
LinkScenario load_scenario(const std::filesystem::path& path);
std::string format_scenario(const LinkScenario& scenario);

// FNV-1a over the canonical text form
std::string scenario_hash(const LinkScenario& scenario);

} // namespace skinlink
