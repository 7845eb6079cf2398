#pragma once

#include "skinlink/scenario.hpp"

#include <cmath>

namespace skinlink::testing {

inline LinkScenario baseline(double r = 15.0, double gain_dbi = 15.4, double theta0_deg = 30.0)
{
    return LinkScenario::make(27e9, 0.1, from_db(gain_dbi), from_db(gain_dbi), r, r,
                              deg_to_rad(theta0_deg));
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

} // namespace skinlink::testing
