#include "skinlink/cli.hpp"

#include "skinlink/analysis.hpp"
#include "skinlink/error.hpp"
#include "skinlink/pcs_model.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace skinlink {

namespace {

constexpr double grazing_warning_deg = 80.0;

struct GlobalOptions {
    std::string scenario;
    std::string table = "synthetic";
    std::string out_dir = ".";
    bool strict_fresnel = false;
    bool centered_cells = false;
    bool gauss_average = false;
};

std::string fixed(double v, int digits = 3)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, sep);) parts.push_back(p);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double parse_number(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (...) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw Error(ErrorKind::config, what + ": '" + text + "' is not a number");
    return v;
}

ReflectionLookupTable load_table(const std::string& spec)
{
    if (spec.rfind("synthetic", 0) == 0) {
        SyntheticTableModel m;
        const auto parts = split(spec, ':');
        if (parts[0] != "synthetic" || parts.size() > 4)
            throw Error(ErrorKind::config, "--table must be a CSV path or synthetic[:U[:span_deg[:loss_db]]]");
        if (parts.size() > 1) {
            const double u = parse_number(parts[1], "table entry count");
            if (u < 0.0 || u != std::floor(u)) throw Error(ErrorKind::config, "table entry count must be an integer");
            m.u_count = static_cast<std::size_t>(u);
        }
        if (parts.size() > 2) m.phase_span = deg_to_rad(parse_number(parts[2], "table phase span"));
        if (parts.size() > 3) m.loss_db = parse_number(parts[3], "table loss");
        return synthetic_table(m);
    }
    return load_table_csv(spec);
}

ModelOptions model_options(const GlobalOptions& g)
{
    ModelOptions o;
    o.average = g.gauss_average ? CellAverage::gauss2x2 : CellAverage::midpoint;
    o.origin = g.centered_cells ? CellOrigin::centered : CellOrigin::edge;
    o.strict_fresnel = g.strict_fresnel;
    return o;
}

LinkScenario require_scenario(const GlobalOptions& g)
{
    if (g.scenario.empty()) throw Error(ErrorKind::config, "--scenario is required");
    return load_scenario(g.scenario);
}

fs::path output_dir(const GlobalOptions& g)
{
    const fs::path dir(g.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw Error(ErrorKind::config, "cannot create output directory " + dir.string());
    return dir;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::config, "cannot write " + path.string());
    f << text;
    if (!f) throw Error(ErrorKind::config, "failed writing " + path.string());
}

void warn_grazing(const LinkScenario& s, std::ostream& err)
{
    if (rad_to_deg(s.theta0) > grazing_warning_deg)
        err << "warning: near-grazing incidence (theta0 = " << fixed(rad_to_deg(s.theta0), 1)
            << " deg); the threshold side grows as 1/sqrt(cos theta0)\n";
}

void warn_fresnel(const ApertureGrid& grid, const LinkScenario& s, std::ostream& err)
{
    const double r_min = fresnel_min_distance(grid.side_l, s.lambda);
    if (s.r_rx < r_min)
        err << "warning: receiver at " << fixed(s.r_rx, 2) << " m is inside the Fresnel distance "
            << fixed(r_min, 2) << " m of a " << fixed(grid.side_l, 3) << " m panel\n";
}

int cmd_thresholds(const GlobalOptions& g, bool write_json, std::ostream& out, std::ostream& err)
{
    const LinkScenario s = require_scenario(g);
    warn_grazing(s, err);
    const OptimalityInterval i = optimality_interval(s);
    out << "L_TH = " << fixed(i.l_th) << " m\n"
        << "L_FR = " << fixed(i.l_fr) << " m\n"
        << "optimality interval: " << (i.nonempty ? "[" + fixed(i.l_th) + ", " + fixed(i.l_fr) + "] m" : "empty")
        << "\n";
    if (write_json) {
        nlohmann::json j{{"l_th_m", i.l_th}, {"l_fr_m", i.l_fr}, {"nonempty", i.nonempty},
                         {"scenario_hash", scenario_hash(s)}};
        write_text(output_dir(g) / "thresholds.json", j.dump(1) + "\n");
    }
    return i.nonempty ? 0 : 2;
}

int cmd_design(const GlobalOptions& g, double side, std::ostream& out, std::ostream& err)
{
    const LinkScenario s = require_scenario(g);
    const ReflectionLookupTable table = load_table(g.table);
    if (!(table.phase_span_yy() > 0.0)) throw Error(ErrorKind::config, "table has no phase coverage");
    const ModelOptions o = model_options(g);
    const ApertureGrid grid = discretize(side, s.default_pitch(), o.origin);
    warn_fresnel(grid, s, err);
    const EmsDesign d = design_ems(s, side, table, o);
    const double a_ems = ems_tpa(s, d.panel, o);
    const double a_pcs = pcs_tpa(s, side, o);
    const double a_opt = ems_upper_bound_tpa(s, grid.side_l);
    const double a_inf = pcs_asymptotic_tpa(s);
    const std::size_t rings = layout_ring_count(d.synthesis.layout, table);
    double worst = 0.0;
    for (double m : d.synthesis.cell_mismatch) worst = std::max(worst, m);

    const fs::path dir = output_dir(g);
    write_layout_file(dir / "layout.json", export_layout(d.synthesis.layout, grid, {s.f, scenario_hash(s)}));
    nlohmann::json rep{{"side_l_m", grid.side_l},
                       {"delta_m", grid.pitch},
                       {"cells", grid.cells()},
                       {"p_count", grid.p_count},
                       {"phi", d.synthesis.phi},
                       {"phi_cell_max", worst},
                       {"ring_count", rings},
                       {"a_ems", a_ems},
                       {"a_ems_db", db(a_ems)},
                       {"a_opt", a_opt},
                       {"a_opt_db", db(a_opt)},
                       {"a_pcs", a_pcs},
                       {"a_pcs_db", db(a_pcs)},
                       {"a_inf", a_inf},
                       {"a_inf_db", db(a_inf)},
                       {"fresnel_ok", fresnel_ok(grid.side_l, s.lambda, s.r_rx)},
                       {"table_entries", table.size()},
                       {"table_phase_span_deg", rad_to_deg(table.phase_span_yy())},
                       {"scenario_hash", scenario_hash(s)}};
    write_text(dir / "design_report.json", rep.dump(1) + "\n");
    out << "cells: " << grid.p_count << " x " << grid.q_count << " (L = " << fixed(grid.side_l, 4) << " m)\n"
        << "residual mismatch: " << format_double(d.synthesis.phi) << " rad^2 (worst cell " << format_double(worst)
        << ")\n"
        << "rings along the central row: " << rings << "\n"
        << "A_EMS = " << fixed(db(a_ems), 2) << " dB, bound A_opt = " << fixed(db(a_opt), 2) << " dB, A_PCS = "
        << fixed(db(a_pcs), 2) << " dB, A_inf = " << fixed(db(a_inf), 2) << " dB\n";
    return 0;
}

std::vector<double> sweep_values(const std::string& list, const std::string& range)
{
    std::vector<double> v;
    if (!list.empty() && !range.empty()) throw Error(ErrorKind::config, "give either --values or --range");
    if (!range.empty()) {
        const auto parts = split(range, ':');
        if (parts.size() != 3) throw Error(ErrorKind::config, "--range is from:to:step");
        const double from = parse_number(parts[0], "range start");
        const double to = parse_number(parts[1], "range end");
        const double step = parse_number(parts[2], "range step");
        if (!(step > 0.0) || to < from) throw Error(ErrorKind::config, "range needs step > 0 and to >= from");
        // round away accumulated step noise so 0.1 + 1 * 0.05 prints as 0.15
        for (long i = 0; from + i * step <= to + 1e-9 * step; ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", from + i * step);
            v.push_back(std::stod(buf));
        }
    } else {
        for (const auto& p : split(list, ','))
            if (!p.empty()) v.push_back(parse_number(p, "sweep value"));
    }
    if (v.empty()) throw Error(ErrorKind::config, "empty sweep values list");
    return v;
}

int cmd_sweep(const GlobalOptions& g, const std::string& var_name, const std::string& list,
              const std::string& range, double side, std::ostream& out, std::ostream& err)
{
    const LinkScenario s = require_scenario(g);
    const SweepVariable var = parse_sweep_variable(var_name);
    const std::vector<double> values = sweep_values(list, range);
    const ReflectionLookupTable table = load_table(g.table);
    SweepSettings settings;
    settings.side_l = side;
    settings.options = model_options(g);
    const auto rows = sweep(s, var, values, table, settings);

    std::size_t failed = 0, warned = 0;
    for (const auto& r : rows) {
        if (!r.ok()) {
            ++failed;
            err << "warning: row " << sweep_variable_name(var) << " = " << format_double(r.value)
                << " failed: " << r.error << "\n";
        } else if (!r.fresnel_ok) {
            ++warned;
        }
    }
    if (warned) err << "warning: " << warned << " row(s) inside the Fresnel distance\n";

    MarkerSet m;
    if (var == SweepVariable::side_l && rows.size() - failed >= 3) m = markers(rows, s, table, settings.options);

    const fs::path dir = output_dir(g);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_text(dir / "sweep.csv", csv.str());
    write_text(dir / "markers.json", markers_json(optimality_interval(s), m).dump(1) + "\n");

    out << sweep_variable_name(var) << "  A_PCS  A_EMS  A_opt  A_inf [dB]\n";
    for (const auto& r : rows) {
        out << format_double(r.value);
        if (r.ok())
            out << "  " << fixed(r.a_pcs_db(), 2) << "  " << fixed(r.a_ems_db(), 2) << "  " << fixed(r.a_opt_db(), 2)
                << "  " << fixed(r.a_inf_db(), 2) << (r.fresnel_ok ? "" : "  (fresnel)") << "\n";
        else
            out << "  failed\n";
    }
    if (var == SweepVariable::side_l) {
        out << "L_TH^EMS = " << (m.l_th_ems ? fixed(*m.l_th_ems) + " m" : "absent") << "\n";
        out << "L_PCS^EMS = " << (m.l_pcs_ems ? fixed(*m.l_pcs_ems) + " m" : "absent") << "\n";
    }
    if (failed == rows.size()) {
        err << "error: every sweep row failed\n";
        return 1;
    }
    return 0;
}

int cmd_cuts(const GlobalOptions& g, double side, const std::string& plane, double extent, std::size_t points,
             std::ostream& out, std::ostream& err)
{
    const LinkScenario s = require_scenario(g);
    std::vector<CutPlane> planes;
    if (plane == "both")
        planes = {CutPlane::transversal, CutPlane::longitudinal};
    else
        planes = {parse_cut_plane(plane)};
    const ReflectionLookupTable table = load_table(g.table);
    const ModelOptions o = model_options(g);
    const EmsDesign d = design_ems(s, side, table, o);
    const ApertureGrid& grid = d.panel.grid;
    warn_fresnel(grid, s, err);
    const SurfaceCurrents ems = gstc_currents(d.panel, s, o);
    const SurfaceCurrents pcs = pcs_currents(PcsPanel{grid}, s, o);
    const fs::path dir = output_dir(g);
    for (CutPlane p : planes) {
        const CutSpec spec{p, extent, points};
        for (const auto& [name, currents] : {std::pair<std::string, const SurfaceCurrents*>{"pcs", &pcs},
                                             std::pair<std::string, const SurfaceCurrents*>{"ems", &ems}}) {
            const FieldCut cut = field_cut_map(*currents, spec, s, g.strict_fresnel);
            const std::string stem = "cut_" + name + "_" + cut_plane_name(p);
            std::ostringstream csv;
            write_field_cut_csv(csv, cut);
            write_text(dir / (stem + ".csv"), csv.str());
            const std::size_t peak = cut.peak_index();
            const std::size_t n = cut.spec.points;
            nlohmann::json meta{{"screen", name},
                                {"plane", cut_plane_name(p)},
                                {"half_extent_m", extent},
                                {"points", n},
                                {"u_axis", "x''"},
                                {"v_axis", p == CutPlane::transversal ? "y''" : "z''"},
                                {"side_l_m", grid.side_l},
                                {"delta_m", grid.pitch},
                                {"points_inside_fresnel_distance", cut.below_fresnel},
                                {"peak_u_m", cut.u[peak % n]},
                                {"peak_v_m", cut.v[peak / n]},
                                {"peak_e_total_v_per_m", cut.e_total_abs[peak]},
                                {"scenario_hash", scenario_hash(s)}};
            write_text(dir / (stem + ".meta.json"), meta.dump(1) + "\n");
            if (cut.below_fresnel)
                err << "warning: " << stem << ": " << cut.below_fresnel << " point(s) inside the Fresnel distance\n";
            out << stem << ": peak " << format_double(cut.e_total_abs[peak]) << " V/m at (u, v) = ("
                << fixed(cut.u[peak % n]) << ", " << fixed(cut.v[peak / n]) << ") m\n";
        }
    }
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Passive reflecting screen link simulator"};
    app.name("skinlink");
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--scenario", g.scenario, "Scenario file (key = value)");
    app.add_option("--table", g.table, "Reflection table: CSV path or synthetic[:U[:span_deg[:loss_db]]]");
    app.add_option("--out", g.out_dir, "Output directory");
    app.add_flag("--strict-fresnel", g.strict_fresnel, "Fail instead of warning inside the Fresnel distance");
    app.add_flag("--centered-cells", g.centered_cells, "Shift cell barycenters by half a pitch");
    app.add_flag("--gauss-average", g.gauss_average, "Average incident fields over 2x2 Gauss points per cell");

    auto* thresholds = app.add_subcommand("thresholds", "Threshold and Fresnel sides of the optimality interval");

    double design_side = 0.0;
    auto* design = app.add_subcommand("design", "Synthesize an EMS layout");
    design->add_option("--side", design_side, "Panel side [m]")->required();

    std::string var, values, range;
    double sweep_side = 1.0;
    auto* sweep_cmd = app.add_subcommand("sweep", "TPA sweep over side_l_m, r_rx_m, theta0_deg or rho_m");
    sweep_cmd->add_option("--var", var, "Sweep variable")->required();
    sweep_cmd->add_option("--values", values, "Comma-separated values");
    sweep_cmd->add_option("--range", range, "from:to:step");
    sweep_cmd->add_option("--side", sweep_side, "Panel side for non-side sweeps [m]");

    double cut_side = 0.0, extent = 0.5;
    std::size_t points = 41;
    std::string plane = "both";
    auto* cuts = app.add_subcommand("cuts", "Field maps around the receiver for PCS and EMS screens");
    cuts->add_option("--side", cut_side, "Panel side [m]")->required();
    cuts->add_option("--plane", plane, "transversal, longitudinal or both");
    cuts->add_option("--extent", extent, "Half width of the cut [m]");
    cuts->add_option("--points", points, "Samples per axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*thresholds) return cmd_thresholds(g, app.count("--out") > 0, out, err);
        if (*design) return cmd_design(g, design_side, out, err);
        if (*sweep_cmd) {
            if (sweep_cmd->count("--values") == 0 && range.empty())
                throw Error(ErrorKind::config, "give --values or --range");
            if (sweep_cmd->count("--values") > 0 && values.empty())
                throw Error(ErrorKind::config, "empty sweep values list");
            return cmd_sweep(g, var, values, range, sweep_side, out, err);
        }
        if (*cuts) return cmd_cuts(g, cut_side, plane, extent, points, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace skinlink
