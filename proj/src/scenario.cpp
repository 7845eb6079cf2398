#include "skinlink/scenario.hpp"

#include "skinlink/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace skinlink {

namespace {

constexpr double mu0_si = 1.25663706212e-6;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const char* const known_keys[] = {"f_hz", "p_tx_w", "g_tx_dbi", "g_rx_dbi",
                                  "r_tx_m", "r_rx_m", "theta0_deg", "delta_m"};

bool is_known(const std::string& key)
{
    for (const char* k : known_keys)
        if (key == k) return true;
    return false;
}

} // namespace

PhysicalConstants PhysicalConstants::si()
{
    const double c = speed_of_light;
    const double mu0 = mu0_si;
    const double eps0 = 1.0 / (mu0 * c * c);
    return {c, eps0, mu0, std::sqrt(mu0 / eps0)};
}

double free_space_impedance()
{
    static const double eta = PhysicalConstants::si().eta;
    return eta;
}

double wavelength(double f_hz)
{
    if (!(f_hz > 0.0)) throw Error(ErrorKind::domain, "frequency must be positive");
    return speed_of_light / f_hz;
}

double db(double ratio)
{
    if (!(ratio > 0.0)) throw Error(ErrorKind::domain, "decibels of a non-positive ratio");
    return 10.0 * std::log10(ratio);
}

double from_db(double decibels) { return std::pow(10.0, decibels / 10.0); }
double deg_to_rad(double deg) { return deg * pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / pi; }

std::string format_double(double v)
{
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

LinkScenario LinkScenario::make(double f_hz, double p_tx_w, double g_tx, double g_rx, double r_tx_m,
                                double r_rx_m, double theta0_rad)
{
    LinkScenario s;
    s.f = f_hz;
    s.lambda = wavelength(f_hz);
    s.p_tx = p_tx_w;
    s.g_tx = g_tx;
    s.g_rx = g_rx;
    s.r_tx = r_tx_m;
    s.r_rx = r_rx_m;
    s.theta0 = theta0_rad;
    s.validate();
    return s;
}

void LinkScenario::validate() const
{
    if (!(f > 0.0)) throw Error(ErrorKind::domain, "frequency must be positive");
    if (std::abs(lambda - speed_of_light / f) > 1e-12 * lambda)
        throw Error(ErrorKind::inconsistency, "wavelength does not match frequency");
    if (!(p_tx > 0.0)) throw Error(ErrorKind::domain, "transmit power must be positive");
    if (!(g_tx > 0.0) || !(g_rx > 0.0)) throw Error(ErrorKind::domain, "gains must be positive");
    if (!(r_tx > 0.0) || !(r_rx > 0.0)) throw Error(ErrorKind::domain, "distances must be positive");
    if (!(theta0 >= 0.0 && theta0 < pi / 2.0))
        throw Error(ErrorKind::domain, "theta0 must lie in [0, 90) degrees");
    if (phi_tx != pi || phi_rx != 0.0)
        throw Error(ErrorKind::inconsistency, "source and receiver must sit in the xz plane");
    if (pitch && !(*pitch > 0.0)) throw Error(ErrorKind::domain, "cell pitch must be positive");
}

Vec3 LinkScenario::tx_position() const
{
    return {-r_tx * std::sin(theta0), 0.0, r_tx * std::cos(theta0)};
}

Vec3 LinkScenario::rx_position() const
{
    return {r_rx * std::sin(theta0), 0.0, r_rx * std::cos(theta0)};
}

LinkScenario LinkScenario::with_theta0(double theta0_rad) const
{
    LinkScenario s = *this;
    s.theta0 = theta0_rad;
    s.validate();
    return s;
}

LinkScenario LinkScenario::with_r_rx(double r_rx_m) const
{
    LinkScenario s = *this;
    s.r_rx = r_rx_m;
    s.validate();
    return s;
}

LinkScenario LinkScenario::with_rho(double rho_m) const
{
    LinkScenario s = *this;
    s.r_tx = s.r_rx = rho_m / 2.0;
    s.validate();
    return s;
}

LinkScenario LinkScenario::with_p_tx(double p_tx_w) const
{
    LinkScenario s = *this;
    s.p_tx = p_tx_w;
    s.validate();
    return s;
}

FieldSample incident_field(const LinkScenario& scenario, const Vec3& p)
{
    if (p.z != 0.0) throw Error(ErrorKind::domain, "incident field is sampled on the panel plane only");
    const Vec3 r = p - scenario.tx_position();
    const double d = norm(r);
    if (d <= 1e-12 * scenario.r_tx)
        throw Error(ErrorKind::singular_geometry, "sample point coincides with the source");
    const double eta = free_space_impedance();
    const double amp = std::sqrt(eta * scenario.g_tx * scenario.p_tx / (2.0 * pi)) / d;
    const cd ey = std::polar(amp, -scenario.wavenumber() * d);
    const Vec3 k = (1.0 / d) * r;
    FieldSample f;
    f.e = {0.0, ey, 0.0};
    // k x (0, E_y, 0) / eta
    f.h = {-k.z * ey / eta, 0.0, k.x * ey / eta};
    return f;
}

LinkScenario parse_scenario(std::istream& in, const std::string& source_name)
{
    std::map<std::string, double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source_name + ":" + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::config, where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string text = trim(line.substr(eq + 1));
        if (!is_known(key)) throw Error(ErrorKind::config, where + "unknown key '" + key + "'");
        if (values.count(key)) throw Error(ErrorKind::config, where + "duplicate key '" + key + "'");
        double v = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
            throw Error(ErrorKind::config, where + "'" + text + "' is not a number");
        values[key] = v;
    }
    for (const char* k : known_keys) {
        if (std::string(k) == "delta_m") continue;
        if (!values.count(k)) throw Error(ErrorKind::config, source_name + ": missing key '" + k + "'");
    }
    try {
        LinkScenario s = LinkScenario::make(values["f_hz"], values["p_tx_w"], from_db(values["g_tx_dbi"]),
                                            from_db(values["g_rx_dbi"]), values["r_tx_m"], values["r_rx_m"],
                                            deg_to_rad(values["theta0_deg"]));
        if (values.count("delta_m")) {
            s.pitch = values["delta_m"];
            s.validate();
        }
        return s;
    } catch (const Error& e) {
        throw Error(ErrorKind::config, source_name + ": " + e.what());
    }
}

LinkScenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open scenario file " + path.string());
    return parse_scenario(in, path.string());
}

std::string format_scenario(const LinkScenario& s)
{
    std::ostringstream o;
    o << "f_hz = " << format_double(s.f) << "\n"
      << "p_tx_w = " << format_double(s.p_tx) << "\n"
      << "g_tx_dbi = " << format_double(db(s.g_tx)) << "\n"
      << "g_rx_dbi = " << format_double(db(s.g_rx)) << "\n"
      << "r_tx_m = " << format_double(s.r_tx) << "\n"
      << "r_rx_m = " << format_double(s.r_rx) << "\n"
      << "theta0_deg = " << format_double(rad_to_deg(s.theta0)) << "\n";
    if (s.pitch) o << "delta_m = " << format_double(*s.pitch) << "\n";
    return o.str();
}

std::string scenario_hash(const LinkScenario& scenario)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : format_scenario(scenario)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace skinlink
