#include "skinlink/sheet.hpp"

#include "skinlink/error.hpp"
#include "skinlink/parallel.hpp"

#include <cmath>

namespace skinlink {

std::vector<CellIncident> cell_incident_fields(const ApertureGrid& grid, const LinkScenario& scenario,
                                               CellAverage average)
{
    std::vector<CellIncident> out(grid.cells());
    // 2-point Gauss-Legendre abscissae of the cell, equal weights
    const double off = grid.pitch / (2.0 * std::sqrt(3.0));
    parallel_for(grid.q_count, [&](std::size_t q) {
        for (std::size_t p = 0; p < grid.p_count; ++p) {
            CellIncident c;
            if (average == CellAverage::midpoint) {
                const FieldSample f = incident_field(scenario, {grid.x(p), grid.y(q), 0.0});
                c = {f.e.x, f.e.y, f.h.x, f.h.y};
            } else {
                for (double dy : {-off, off})
                    for (double dx : {-off, off}) {
                        const FieldSample f = incident_field(scenario, {grid.x(p) + dx, grid.y(q) + dy, 0.0});
                        c.e_x += 0.25 * f.e.x;
                        c.e_y += 0.25 * f.e.y;
                        c.h_x += 0.25 * f.h.x;
                        c.h_y += 0.25 * f.h.y;
                    }
            }
            out[grid.index(p, q)] = c;
        }
    });
    return out;
}

SurfaceCurrents sheet_currents(const ApertureGrid& grid, std::span<const ReflectionTensor> gamma,
                               std::span<const CellIncident> incident)
{
    if (gamma.size() != grid.cells() || incident.size() != grid.cells())
        throw Error(ErrorKind::inconsistency, "per-cell inputs do not match the grid");
    SurfaceCurrents c = SurfaceCurrents::zeros(grid);
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        const ReflectionTensor& g = gamma[i];
        const CellIncident& f = incident[i];
        const cd e_av_x = 0.5 * (1.0 + g.xx) * f.e_x;
        const cd e_av_y = 0.5 * (1.0 + g.yy) * f.e_y;
        const cd h_av_x = 0.5 * (1.0 - g.yy) * f.h_x;
        const cd h_av_y = 0.5 * (1.0 - g.xx) * f.h_y;
        c.je_x[i] = -2.0 * h_av_y;
        c.je_y[i] = 2.0 * h_av_x;
        c.jm_x[i] = 2.0 * e_av_y;
        c.jm_y[i] = -2.0 * e_av_x;
    }
    return c;
}

Susceptibility susceptibility_from_gamma(cd gamma, double k, double cos_theta)
{
    if (gamma == cd{-1.0, 0.0} || gamma == cd{1.0, 0.0})
        throw Error(ErrorKind::domain, "susceptibility is unbounded for a perfect conductor or magnetic wall");
    const cd j{0.0, 1.0};
    return {-2.0 * j * cos_theta * (1.0 - gamma) / (k * (1.0 + gamma)),
            -2.0 * j * (1.0 + gamma) / (k * (1.0 - gamma) * cos_theta)};
}

cd gamma_from_susceptibility(cd sigma_e, double k, double cos_theta)
{
    const cd s = cd{0.0, k} * sigma_e / (2.0 * cos_theta);
    return (1.0 - s) / (1.0 + s);
}

ObservationPoint receiver_point(const LinkScenario& scenario)
{
    return {scenario.r_rx, scenario.theta0, scenario.phi_rx};
}

void check_fresnel(const ApertureGrid& grid, const LinkScenario& scenario, bool strict)
{
    if (strict && !fresnel_ok(grid.side_l, scenario.lambda, scenario.r_rx))
        throw Error(ErrorKind::validity, "receiver lies inside the Fresnel distance of the panel");
}

double tpa_from_currents(const SurfaceCurrents& currents, const LinkScenario& scenario)
{
    const double eta = free_space_impedance();
    const ScatteredField f = scattered_field(currents, receiver_point(scenario), scenario.lambda, eta);
    return received_power(f, scenario.g_rx, scenario.lambda, eta) / scenario.p_tx;
}

} // namespace skinlink
