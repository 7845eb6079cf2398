#pragma once

#include "skinlink/sheet.hpp"

namespace skinlink {

struct PcsPanel {
    ApertureGrid grid;
};

SurfaceCurrents pcs_currents(const PcsPanel& panel, const LinkScenario& scenario,
                             const ModelOptions& options = {});

double pcs_tpa(const LinkScenario& scenario, double side_l, const ModelOptions& options = {});

double pcs_asymptotic_tpa(const LinkScenario& scenario);

} // namespace skinlink
