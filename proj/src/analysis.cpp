#include "skinlink/analysis.hpp"

#include "skinlink/error.hpp"
#include "skinlink/parallel.hpp"
#include "skinlink/pcs_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

namespace skinlink {

namespace {

std::string csv_quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// Bisection on [lo, hi] where pred(lo) is false and pred(hi) is true.
double refine(double lo, double hi, double tolerance, const std::function<bool(double)>& pred)
{
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? hi : lo) = mid;
    }
    return hi;
}

} // namespace

double l_threshold(const LinkScenario& s)
{
    const double c = std::cos(s.theta0);
    if (!(s.theta0 < pi / 2.0) || !(c > 0.0)) throw Error(ErrorKind::domain, "grazing incidence has no threshold");
    return std::sqrt(s.lambda / c * (s.r_tx * s.r_rx) / (s.r_tx + s.r_rx));
}

double l_fresnel(const LinkScenario& s)
{
    if (s.r_rx < 10.0 * s.lambda) throw Error(ErrorKind::validity, "receiver closer than ten wavelengths");
    const double s2 = std::sqrt(2.0);
    const double r = s.r_rx / 0.62;
    return std::min(s.r_rx / (10.0 * s2), std::cbrt(s.lambda / (2.0 * s2) * r * r));
}

OptimalityInterval optimality_interval(const LinkScenario& scenario)
{
    OptimalityInterval i;
    i.l_th = l_threshold(scenario);
    i.l_fr = l_fresnel(scenario);
    i.nonempty = i.l_th <= i.l_fr;
    return i;
}

SweepVariable parse_sweep_variable(const std::string& name)
{
    if (name == "side_l_m") return SweepVariable::side_l;
    if (name == "r_rx_m") return SweepVariable::r_rx;
    if (name == "theta0_deg") return SweepVariable::theta0;
    if (name == "rho_m") return SweepVariable::rho;
    throw Error(ErrorKind::config,
                "unknown sweep variable '" + name + "' (side_l_m, r_rx_m, theta0_deg, rho_m)");
}

const char* sweep_variable_name(SweepVariable var)
{
    switch (var) {
    case SweepVariable::side_l: return "side_l_m";
    case SweepVariable::r_rx: return "r_rx_m";
    case SweepVariable::theta0: return "theta0_deg";
    case SweepVariable::rho: return "rho_m";
    }
    return "?";
}

LinkScenario apply_sweep_value(const LinkScenario& scenario, SweepVariable var, double value)
{
    switch (var) {
    case SweepVariable::side_l: return scenario;
    case SweepVariable::r_rx: return scenario.with_r_rx(value);
    case SweepVariable::theta0: return scenario.with_theta0(deg_to_rad(value));
    case SweepVariable::rho: return scenario.with_rho(value);
    }
    return scenario;
}

TpaSweepRow evaluate_point(const LinkScenario& scenario, double side_l, const ReflectionLookupTable& table,
                           const ModelOptions& options)
{
    const ApertureGrid grid = discretize(side_l, scenario.default_pitch(), options.origin);
    check_fresnel(grid, scenario, options.strict_fresnel);
    TpaSweepRow row;
    row.side_l = grid.side_l;
    row.fresnel_ok = fresnel_ok(grid.side_l, scenario.lambda, scenario.r_rx);
    row.a_pcs = tpa_from_currents(pcs_currents(PcsPanel{grid}, scenario, options), scenario);
    const EmsDesign d = design_ems(scenario, side_l, table, options);
    row.a_ems = tpa_from_currents(gstc_currents(d.panel, scenario, options), scenario);
    row.phi = d.synthesis.phi;
    row.a_opt = ems_upper_bound_tpa(scenario, grid.side_l);
    row.a_inf = pcs_asymptotic_tpa(scenario);
    return row;
}

std::vector<TpaSweepRow> sweep(const LinkScenario& scenario, SweepVariable var, std::span<const double> values,
                               const ReflectionLookupTable& table, const SweepSettings& settings)
{
    if (!std::is_sorted(values.begin(), values.end()))
        throw Error(ErrorKind::config, "sweep values must be sorted");
    std::vector<TpaSweepRow> rows(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
        TpaSweepRow& row = rows[i];
        try {
            const LinkScenario s = apply_sweep_value(scenario, var, values[i]);
            const double side = var == SweepVariable::side_l ? values[i] : settings.side_l;
            row = evaluate_point(s, side, table, settings.options);
        } catch (const std::exception& e) {
            row = TpaSweepRow{};
            row.error = e.what();
            row.fresnel_ok = false;
        }
        row.var = var;
        row.value = values[i];
    });
    return rows;
}

MarkerSet markers(std::span<const TpaSweepRow> rows, const LinkScenario& scenario,
                  const ReflectionLookupTable& table, const ModelOptions& options, double tolerance)
{
    if (rows.size() < 3) throw Error(ErrorKind::config, "markers need at least three sweep rows");
    std::vector<TpaSweepRow> ok;
    for (const auto& r : rows) {
        if (r.var != SweepVariable::side_l) throw Error(ErrorKind::config, "markers need a panel-side sweep");
        if (r.ok()) ok.push_back(r);
    }
    std::sort(ok.begin(), ok.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    MarkerSet m;
    if (ok.size() < 2) return m;

    // first row pair where A_EMS climbs onto A_inf; the sweep start if already above
    if (ok.front().a_ems >= ok.front().a_inf) m.l_th_ems = ok.front().value;
    for (std::size_t i = 0; !m.l_th_ems && i + 1 < ok.size(); ++i) {
        if (ok[i].a_ems < ok[i].a_inf && ok[i + 1].a_ems >= ok[i + 1].a_inf) {
            const double a_inf = ok[i].a_inf;
            m.l_th_ems = refine(ok[i].value, ok[i + 1].value, tolerance, [&](double l) {
                const auto d = design_ems(scenario, l, table, options);
                return tpa_from_currents(gstc_currents(d.panel, scenario, options), scenario) >= a_inf;
            });
            break;
        }
    }

    // EMS must stay strictly ahead of PCS from the bracket to the end of the sweep
    const auto ahead = [](const TpaSweepRow& r) { return r.a_ems > r.a_pcs; };
    std::size_t last_behind = ok.size();
    for (std::size_t i = 0; i < ok.size(); ++i)
        if (!ahead(ok[i])) last_behind = i;
    if (last_behind == ok.size()) {
        m.l_pcs_ems = ok.front().value;
    } else if (last_behind + 1 < ok.size()) {
        m.l_pcs_ems = refine(ok[last_behind].value, ok[last_behind + 1].value, tolerance, [&](double l) {
            const auto r = evaluate_point(scenario, l, table, options);
            return r.a_ems > r.a_pcs;
        });
    }
    return m;
}

DeltaMetrics delta_metrics(const TpaSweepRow& row)
{
    return {db(row.a_ems) - db(row.a_pcs), db(row.a_ems) - db(row.a_inf), db(row.a_ems) - db(row.a_opt)};
}

void write_sweep_csv(std::ostream& out, std::span<const TpaSweepRow> rows)
{
    out << "var,value,a_pcs_db,a_ems_db,a_opt_db,a_inf_db,fresnel_ok,side_l_m,a_pcs,a_ems,a_opt,a_inf,phi_rad2,"
           "status\n";
    for (const auto& r : rows) {
        out << sweep_variable_name(r.var) << ',' << format_double(r.value) << ',';
        if (r.ok()) {
            out << format_double(r.a_pcs_db()) << ',' << format_double(r.a_ems_db()) << ','
                << format_double(r.a_opt_db()) << ',' << format_double(r.a_inf_db()) << ','
                << (r.fresnel_ok ? "true" : "false") << ',' << format_double(r.side_l) << ','
                << format_double(r.a_pcs) << ',' << format_double(r.a_ems) << ',' << format_double(r.a_opt) << ','
                << format_double(r.a_inf) << ',' << format_double(r.phi) << ",ok\n";
        } else {
            out << ",,,,false,,,,,,," << csv_quote("error: " + r.error) << '\n';
        }
    }
}

nlohmann::json markers_json(const OptimalityInterval& interval, const MarkerSet& markers)
{
    nlohmann::json j;
    j["l_th_m"] = interval.l_th;
    j["l_fr_m"] = interval.l_fr;
    j["interval_nonempty"] = interval.nonempty;
    j["l_th_ems_m"] = markers.l_th_ems ? nlohmann::json(*markers.l_th_ems) : nlohmann::json(nullptr);
    j["l_pcs_ems_m"] = markers.l_pcs_ems ? nlohmann::json(*markers.l_pcs_ems) : nlohmann::json(nullptr);
    j["l_th_ems_present"] = markers.l_th_ems.has_value();
    j["l_pcs_ems_present"] = markers.l_pcs_ems.has_value();
    return j;
}

} // namespace skinlink
