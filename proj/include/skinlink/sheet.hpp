#pragma once

// Equivalent currents of a thin reflecting sheet, shared by the metallic and
// the patterned screen models.

#include "skinlink/aperture.hpp"
#include "skinlink/field_engine.hpp"
#include "skinlink/scenario.hpp"

#include <span>
#include <vector>

namespace skinlink {

struct ReflectionTensor {
    cd xx{-1.0, 0.0};
    cd yy{-1.0, 0.0};
};

enum class CellAverage {
    midpoint,
    gauss2x2,
};

struct ModelOptions {
    CellAverage average = CellAverage::midpoint;
    CellOrigin origin = CellOrigin::edge;
    bool strict_fresnel = false;
};

// tangential incident field averaged over one cell
struct CellIncident {
    cd e_x{};
    cd e_y{};
    cd h_x{};
    cd h_y{};
};

std::vector<CellIncident> cell_incident_fields(const ApertureGrid& grid, const LinkScenario& scenario,
                                               CellAverage average);

// E_av = (1 + G) E / 2, H_av = (1 - G) H / 2, J_e = 2 n x H_av, J_m = -2 n x E_av.
// gamma_yy acts on (E_y, H_x), gamma_xx on (E_x, H_y).
SurfaceCurrents sheet_currents(const ApertureGrid& grid, std::span<const ReflectionTensor> gamma,
                               std::span<const CellIncident> incident);

struct Susceptibility {
    cd sigma_e;  // m
    cd sigma_m;  // m
};

// Per-polarization bilinear map between a reflection coefficient and the
// tangential sheet susceptibilities at local incidence cos_theta.
// Poles: gamma = -1 for sigma_e, gamma = +1 for sigma_m.
Susceptibility susceptibility_from_gamma(cd gamma, double k, double cos_theta);
cd gamma_from_susceptibility(cd sigma_e, double k, double cos_theta);

// throws a validity error if strict and r_rx is inside the Fresnel bound
void check_fresnel(const ApertureGrid& grid, const LinkScenario& scenario, bool strict);

ObservationPoint receiver_point(const LinkScenario& scenario);

double tpa_from_currents(const SurfaceCurrents& currents, const LinkScenario& scenario);

} // namespace skinlink
