#include "skinlink/field_engine.hpp"

#include "skinlink/error.hpp"
#include "skinlink/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace skinlink {

namespace {

constexpr std::size_t compensated_threshold = 100000;
constexpr std::size_t rows_per_block = 16;

// Neumaier running sum for one real channel
struct Compensated {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x)
    {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

struct ComplexSum {
    bool compensated = false;
    cd plain{};
    Compensated re;
    Compensated im;

    void add(cd v)
    {
        if (compensated) {
            re.add(v.real());
            im.add(v.imag());
        } else {
            plain += v;
        }
    }
    cd value() const { return compensated ? cd{re.value(), im.value()} : plain; }
};

Vec3 theta_hat(double theta, double phi)
{
    return {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta)};
}

Vec3 phi_hat(double phi) { return {-std::sin(phi), std::cos(phi), 0.0}; }

} // namespace

SurfaceCurrents SurfaceCurrents::zeros(const ApertureGrid& grid)
{
    const std::size_t n = grid.cells();
    return {grid, std::vector<cd>(n), std::vector<cd>(n), std::vector<cd>(n), std::vector<cd>(n)};
}

void SurfaceCurrents::validate() const
{
    const std::size_t n = grid.cells();
    if (je_x.size() != n || je_y.size() != n || jm_x.size() != n || jm_y.size() != n)
        throw Error(ErrorKind::inconsistency, "current arrays do not match the grid");
    auto finite = [](const std::vector<cd>& v) {
        return std::all_of(v.begin(), v.end(),
                           [](cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    };
    if (!finite(je_x) || !finite(je_y) || !finite(jm_x) || !finite(jm_y))
        throw Error(ErrorKind::domain, "non-finite surface current");
}

ObservationPoint ObservationPoint::from_cartesian(const Vec3& p)
{
    return {norm(p), std::atan2(std::hypot(p.x, p.y), p.z), std::atan2(p.y, p.x)};
}

Vec3 ObservationPoint::to_cartesian() const
{
    return {r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi), r * std::cos(theta)};
}

double ScatteredField::magnitude() const { return std::sqrt(std::norm(e_theta) + std::norm(e_phi)); }

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

double beta(double x, double y, const ObservationPoint& obs)
{
    const double st = std::sin(obs.theta), ct = std::cos(obs.theta);
    const double sp = std::sin(obs.phi), cp = std::cos(obs.phi);
    const double t = x * st * sp - y * st * cp;
    return x * st * cp + y * st * sp - ct * ct * (x * x + y * y) / (2.0 * obs.r) - t * t / (2.0 * obs.r);
}

ScatteredField scattered_field(const SurfaceCurrents& currents, const ObservationPoint& obs, double lambda,
                               double eta)
{
    currents.validate();
    if (!(obs.r > 0.0)) throw Error(ErrorKind::singular_geometry, "observation distance must be positive");
    const ApertureGrid& g = currents.grid;
    const double k = 2.0 * pi / lambda;
    const double st = std::sin(obs.theta), ct = std::cos(obs.theta);
    const double sp = std::sin(obs.phi), cp = std::cos(obs.phi);
    const double delta = g.pitch;
    const cd j{0.0, 1.0};
    const cd prefactor = -j * std::polar(1.0, -k * obs.r) / (2.0 * lambda * obs.r) * delta * delta *
                         sinc(pi * delta * st * cp / lambda) * sinc(pi * delta * st * sp / lambda);

    const bool compensated = g.cells() > compensated_threshold;
    const std::size_t blocks = (g.q_count + rows_per_block - 1) / rows_per_block;
    std::vector<cd> part_theta(blocks), part_phi(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        ComplexSum sum_t{compensated}, sum_p{compensated};
        const std::size_t q_end = std::min(g.q_count, (b + 1) * rows_per_block);
        for (std::size_t q = b * rows_per_block; q < q_end; ++q) {
            const double y = g.y(q);
            for (std::size_t p = 0; p < g.p_count; ++p) {
                const double x = g.x(p);
                const std::size_t i = g.index(p, q);
                const cd phase = std::polar(1.0, k * beta(x, y, obs));
                const cd jex = currents.je_x[i], jey = currents.je_y[i];
                const cd jmx = currents.jm_x[i], jmy = currents.jm_y[i];
                const cd bt = eta * ct * cp * jex + eta * ct * sp * jey - sp * jmx + cp * jmy;
                const cd bp = -eta * sp * jex + eta * cp * jey - ct * cp * jmx - ct * sp * jmy;
                sum_t.add(phase * bt);
                sum_p.add(phase * bp);
            }
        }
        part_theta[b] = sum_t.value();
        part_phi[b] = sum_p.value();
    });
    ComplexSum total_t{compensated}, total_p{compensated};
    for (std::size_t b = 0; b < blocks; ++b) {
        total_t.add(part_theta[b]);
        total_p.add(part_phi[b]);
    }
    return {prefactor * total_t.value(), prefactor * total_p.value()};
}

double received_power(const ScatteredField& field, double g_rx, double lambda, double eta)
{
    return lambda * lambda * g_rx * (std::norm(field.e_theta) + std::norm(field.e_phi)) / (8.0 * pi * eta);
}

double fresnel_min_distance(double side_l, double lambda)
{
    const double s2 = std::sqrt(2.0);
    return std::max({10.0 * side_l * s2, 0.62 * std::sqrt(2.0 * side_l * side_l * side_l * s2 / lambda),
                     10.0 * lambda});
}

bool fresnel_ok(double side_l, double lambda, double r) { return r >= fresnel_min_distance(side_l, lambda); }

ScatteredField quadrature_oracle(const SurfaceCurrents& currents, const ObservationPoint& obs, double lambda,
                                 double eta, int subdivisions, OracleKernel kernel)
{
    currents.validate();
    if (subdivisions < 1) throw Error(ErrorKind::domain, "subdivisions must be at least 1");
    if (!(obs.r > 0.0)) throw Error(ErrorKind::singular_geometry, "observation distance must be positive");
    const ApertureGrid& g = currents.grid;
    const double k = 2.0 * pi / lambda;
    const cd j{0.0, 1.0};
    const Vec3 target = obs.to_cartesian();
    const Vec3 r_hat = (1.0 / obs.r) * target;
    const double h = g.pitch / subdivisions;
    const double area = h * h;

    CVec3 e{};
    for (std::size_t q = 0; q < g.q_count; ++q)
        for (std::size_t p = 0; p < g.p_count; ++p) {
            const std::size_t i = g.index(p, q);
            const CVec3 je{currents.je_x[i], currents.je_y[i], 0.0};
            const CVec3 jm{currents.jm_x[i], currents.jm_y[i], 0.0};
            for (int b = 0; b < subdivisions; ++b)
                for (int a = 0; a < subdivisions; ++a) {
                    const Vec3 src{g.x(p) - g.pitch / 2.0 + (a + 0.5) * h, g.y(q) - g.pitch / 2.0 + (b + 0.5) * h,
                                   0.0};
                    Vec3 u;
                    cd green;
                    if (kernel == OracleKernel::spherical) {
                        const Vec3 rv = target - src;
                        const double dist = norm(rv);
                        u = (1.0 / dist) * rv;
                        green = -j * std::polar(1.0, -k * dist) / (2.0 * lambda * dist);
                    } else {
                        u = r_hat;
                        green = -j * std::polar(1.0, -k * (obs.r - beta(src.x, src.y, obs))) / (2.0 * lambda * obs.r);
                    }
                    const cd radial = dot(je, u);
                    const CVec3 transverse{je.x - radial * u.x, je.y - radial * u.y, je.z - radial * u.z};
                    const CVec3 term = cd{eta, 0.0} * transverse + cross(jm, u);
                    e = e + (green * area) * term;
                }
        }
    return {dot(e, theta_hat(obs.theta, obs.phi)), dot(e, phi_hat(obs.phi))};
}

CutPlane parse_cut_plane(const std::string& name)
{
    if (name == "transversal") return CutPlane::transversal;
    if (name == "longitudinal") return CutPlane::longitudinal;
    throw Error(ErrorKind::config, "unknown cut plane '" + name + "'");
}

const char* cut_plane_name(CutPlane plane)
{
    return plane == CutPlane::transversal ? "transversal" : "longitudinal";
}

ReceiverFrame receiver_frame(const LinkScenario& scenario)
{
    const double s = std::sin(scenario.theta0), c = std::cos(scenario.theta0);
    return {scenario.rx_position(), {c, 0.0, -s}, {0.0, 1.0, 0.0}, {s, 0.0, c}};
}

std::size_t FieldCut::peak_index() const
{
    return static_cast<std::size_t>(std::max_element(e_total_abs.begin(), e_total_abs.end()) - e_total_abs.begin());
}

FieldCut field_cut_map(const SurfaceCurrents& currents, const CutSpec& cut, const LinkScenario& scenario,
                       bool strict_fresnel)
{
    currents.validate();
    if (!(cut.half_extent >= 0.0)) throw Error(ErrorKind::config, "cut extent must be non-negative");
    if (cut.points == 0) throw Error(ErrorKind::config, "cut needs at least one point per axis");
    FieldCut out;
    out.spec = cut;
    const std::size_t n = cut.half_extent == 0.0 ? 1 : cut.points;
    out.spec.points = n;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : -cut.half_extent + 2.0 * cut.half_extent * i / (n - 1);
        out.u.push_back(t);
        out.v.push_back(t);
    }
    const ReceiverFrame f = receiver_frame(scenario);
    const Vec3 second = cut.plane == CutPlane::transversal ? f.y : f.z;
    const double r_min = fresnel_min_distance(currents.grid.side_l, scenario.lambda);
    std::vector<ObservationPoint> obs(n * n);
    for (std::size_t iv = 0; iv < n; ++iv)
        for (std::size_t iu = 0; iu < n; ++iu) {
            const Vec3 p = f.origin + out.u[iu] * f.x + out.v[iv] * second;
            if (!(p.z > 0.0))
                throw Error(ErrorKind::validity, "cut point leaves the reflection half-space");
            obs[iv * n + iu] = ObservationPoint::from_cartesian(p);
            if (obs[iv * n + iu].r < r_min) {
                if (strict_fresnel)
                    throw Error(ErrorKind::validity, "cut point lies inside the Fresnel distance");
                ++out.below_fresnel;
            }
        }
    out.e_phi_abs.resize(n * n);
    out.e_total_abs.resize(n * n);
    const double eta = free_space_impedance();
    parallel_for(n * n, [&](std::size_t i) {
        const ScatteredField e = scattered_field(currents, obs[i], scenario.lambda, eta);
        out.e_phi_abs[i] = std::abs(e.e_phi);
        out.e_total_abs[i] = e.magnitude();
    });
    return out;
}

void write_field_cut_csv(std::ostream& out, const FieldCut& cut)
{
    out << "u_m,v_m,e_phi_abs_v_per_m,e_total_abs_v_per_m\n";
    const std::size_t n = cut.spec.points;
    for (std::size_t iv = 0; iv < n; ++iv)
        for (std::size_t iu = 0; iu < n; ++iu) {
            const std::size_t i = iv * n + iu;
            out << format_double(cut.u[iu]) << ',' << format_double(cut.v[iv]) << ','
                << format_double(cut.e_phi_abs[i]) << ',' << format_double(cut.e_total_abs[i]) << '\n';
        }
}

} // namespace skinlink
