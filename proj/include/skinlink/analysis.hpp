#pragma once

#include "skinlink/ems_model.hpp"

#include <json.hpp>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skinlink {

double l_threshold(const LinkScenario& scenario);
double l_fresnel(const LinkScenario& scenario);

struct OptimalityInterval {
    double l_th = 0.0;
    double l_fr = 0.0;
    bool nonempty = false;
};

OptimalityInterval optimality_interval(const LinkScenario& scenario);

enum class SweepVariable {
    side_l,  // m
    r_rx,    // m
    theta0,  // values in degrees
    rho,     // m, split evenly between r_tx and r_rx
};

SweepVariable parse_sweep_variable(const std::string& name);
const char* sweep_variable_name(SweepVariable var);

struct SweepSettings {
    // panel side for non-L sweeps
    double side_l = 1.0;
    ModelOptions options;
};

struct TpaSweepRow {
    SweepVariable var = SweepVariable::side_l;
    double value = 0.0;
    double side_l = 0.0;  // snapped panel side actually simulated
    double a_pcs = 0.0;
    double a_ems = 0.0;
    double a_opt = 0.0;
    double a_inf = 0.0;
    double phi = 0.0;
    bool fresnel_ok = true;
    std::string error;  // empty on success

    bool ok() const { return error.empty(); }
    double a_pcs_db() const { return db(a_pcs); }
    double a_ems_db() const { return db(a_ems); }
    double a_opt_db() const { return db(a_opt); }
    double a_inf_db() const { return db(a_inf); }
};

// one full evaluation: grid, synthesis, both screens and both bounds
TpaSweepRow evaluate_point(const LinkScenario& scenario, double side_l,
                           const ReflectionLookupTable& table, const ModelOptions& options = {});

LinkScenario apply_sweep_value(const LinkScenario& scenario, SweepVariable var, double value);

std::vector<TpaSweepRow> sweep(const LinkScenario& scenario, SweepVariable var,
                               std::span<const double> values, const ReflectionLookupTable& table,
                               const SweepSettings& settings = {});

struct MarkerSet {
    std::optional<double> l_th_ems;
    std::optional<double> l_pcs_ems;
};

inline constexpr double marker_tolerance = 1e-3;  // m

// Only side_l sweeps carry markers. Crossings are refined by bisection with
// fresh synthesis at every probe.
MarkerSet markers(std::span<const TpaSweepRow> rows, const LinkScenario& scenario,
                  const ReflectionLookupTable& table, const ModelOptions& options = {},
                  double tolerance = marker_tolerance);

struct DeltaMetrics {
    double d_pcs = 0.0;  // dB, EMS over PCS
    double d_inf = 0.0;  // dB, EMS over infinite PCS
    double d_opt = 0.0;  // dB, EMS over the ideal bound
};

DeltaMetrics delta_metrics(const TpaSweepRow& row);

void write_sweep_csv(std::ostream& out, std::span<const TpaSweepRow> rows);
nlohmann::json markers_json(const OptimalityInterval& interval, const MarkerSet& markers);

} // namespace skinlink
