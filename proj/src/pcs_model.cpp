#include "skinlink/pcs_model.hpp"

#include <vector>

namespace skinlink {

SurfaceCurrents pcs_currents(const PcsPanel& panel, const LinkScenario& scenario, const ModelOptions& options)
{
    const std::vector<ReflectionTensor> conductor(panel.grid.cells(), ReflectionTensor{-1.0, -1.0});
    const auto incident = cell_incident_fields(panel.grid, scenario, options.average);
    return sheet_currents(panel.grid, conductor, incident);
}

double pcs_tpa(const LinkScenario& scenario, double side_l, const ModelOptions& options)
{
    const PcsPanel panel{discretize(side_l, scenario.default_pitch(), options.origin)};
    check_fresnel(panel.grid, scenario, options.strict_fresnel);
    return tpa_from_currents(pcs_currents(panel, scenario, options), scenario);
}

double pcs_asymptotic_tpa(const LinkScenario& scenario)
{
    const double a = scenario.lambda / (4.0 * pi * (scenario.r_rx + scenario.r_tx));
    return a * a * scenario.g_rx * scenario.g_tx;
}

} // namespace skinlink
