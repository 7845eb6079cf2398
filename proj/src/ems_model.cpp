#include "skinlink/ems_model.hpp"

#include "skinlink/error.hpp"
#include "skinlink/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace skinlink {

namespace {

constexpr double s_curve_steepness = 1.0;
constexpr double window_guard = 1e-9;  // rad

cd interpolate(cd a, cd b, double t)
{
    const double ma = std::abs(a), mb = std::abs(b);
    const double m = ma + t * (mb - ma);
    const double turn = t * wrap_phase(std::arg(b) - std::arg(a));
    if (ma > 0.0) return a * (m / ma) * std::polar(1.0, turn);
    return std::polar(m, std::arg(a) + turn);
}

double parse_field(const std::string& text, const std::string& where)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (...) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw Error(ErrorKind::config, where + "'" + text + "' is not a number");
    return v;
}

// candidate geometries on the synthesis grid, duplicates in gamma removed
struct CandidateSet {
    std::vector<double> g;
    std::vector<cd> gamma;
    std::vector<double> psi;            // arg of gamma
    std::vector<std::size_t> by_phase;  // indices sorted by psi
    std::vector<double> sorted_psi;
    double min_mag = 0.0;
};

CandidateSet make_candidates(const ReflectionLookupTable& table)
{
    CandidateSet c;
    const double span = table.g_max() - table.g_min();
    const auto n = static_cast<std::size_t>(std::floor(span / synthesis_resolution + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        const double g = table.g_min() + static_cast<double>(i) * synthesis_resolution;
        if (g > table.g_max()) break;
        const cd gamma = table.lookup(g).yy;
        // an identical reflection at a larger g can never win a tie
        if (!c.gamma.empty() && gamma == c.gamma.back()) continue;
        c.g.push_back(g);
        c.gamma.push_back(gamma);
    }
    if (c.g.back() < table.g_max()) {
        const cd gamma = table.lookup(table.g_max()).yy;
        if (gamma != c.gamma.back()) {
            c.g.push_back(table.g_max());
            c.gamma.push_back(gamma);
        }
    }
    c.psi.resize(c.g.size());
    c.min_mag = std::abs(c.gamma[0]);
    for (std::size_t i = 0; i < c.g.size(); ++i) {
        c.psi[i] = std::arg(c.gamma[i]);
        c.min_mag = std::min(c.min_mag, std::abs(c.gamma[i]));
    }
    c.by_phase.resize(c.g.size());
    std::iota(c.by_phase.begin(), c.by_phase.end(), 0);
    std::stable_sort(c.by_phase.begin(), c.by_phase.end(),
                     [&](std::size_t a, std::size_t b) { return c.psi[a] < c.psi[b]; });
    for (std::size_t i : c.by_phase) c.sorted_psi.push_back(c.psi[i]);
    return c;
}

double mismatch(const CellResponse& cell, cd gamma, double target)
{
    const double e = wrap_phase(predicted_phase(cell, gamma) - target);
    return e * e;
}

struct Choice {
    std::size_t index;
    double mismatch;
};

Choice best_exhaustive(const CandidateSet& c, const CellResponse& cell, double target)
{
    Choice best{0, mismatch(cell, c.gamma[0], target)};
    for (std::size_t i = 1; i < c.g.size(); ++i) {
        const double m = mismatch(cell, c.gamma[i], target);
        if (m < best.mismatch) best = {i, m};
    }
    return best;
}

// Only candidates whose own phase lies near the target can win: the response
// a + b*gamma turns arg(gamma) by at most asin(|a/b| / |gamma|).
Choice best_windowed(const CandidateSet& c, const CellResponse& cell, double target)
{
    const std::size_t n = c.g.size();
    if (cell.b == cd{} || n < 8) return best_exhaustive(c, cell, target);
    const double w = std::abs(cell.a / cell.b);
    if (!(w < c.min_mag)) return best_exhaustive(c, cell, target);
    const double slack = std::asin(w / c.min_mag);
    const double aim = wrap_phase(target - std::arg(cell.b));

    const auto at = static_cast<std::size_t>(std::lower_bound(c.sorted_psi.begin(), c.sorted_psi.end(), aim) -
                                             c.sorted_psi.begin());
    const std::size_t right0 = at % n;
    const std::size_t left0 = (at + n - 1) % n;
    auto dist = [&](std::size_t k) { return std::abs(wrap_phase(c.sorted_psi[k] - aim)); };
    const double limit = std::min(dist(right0), dist(left0)) + 2.0 * slack + window_guard;

    Choice best{n, 0.0};
    auto consider = [&](std::size_t k) {
        const std::size_t i = c.by_phase[k];
        const double m = mismatch(cell, c.gamma[i], target);
        if (best.index == n || m < best.mismatch || (m == best.mismatch && i < best.index)) best = {i, m};
    };
    std::size_t seen = 0;
    for (std::size_t k = right0; seen < n && dist(k) <= limit; k = (k + 1) % n, ++seen) consider(k);
    for (std::size_t k = left0; seen < n && dist(k) <= limit; k = (k + n - 1) % n, ++seen) consider(k);
    return best;
}

template <class Pick>
SynthesisResult synthesize(const ApertureGrid& grid, const ReflectionLookupTable& table,
                           const TargetPhases& targets, const LinkScenario& scenario, const ModelOptions& options,
                           Pick pick)
{
    if (targets.phase.size() != grid.cells())
        throw Error(ErrorKind::inconsistency, "target phases do not match the grid");
    const CandidateSet cand = make_candidates(table);
    const auto resp = cell_responses(grid, scenario, options);
    SynthesisResult r;
    r.layout = DescriptorVector(grid.side_l, grid.p_count, grid.q_count, 1, table.g_min());
    r.cell_mismatch.assign(grid.cells(), 0.0);
    parallel_for(grid.q_count, [&](std::size_t q) {
        for (std::size_t p = 0; p < grid.p_count; ++p) {
            const std::size_t i = grid.index(p, q);
            const Choice ch = pick(cand, resp[i], targets.phase[i]);
            r.layout.set_g(p, q, cand.g[ch.index]);
            r.cell_mismatch[i] = ch.mismatch;
        }
    });
    double sum = 0.0, carry = 0.0;
    for (double m : r.cell_mismatch) {
        const double t = sum + m;
        carry += (sum - t) + m;
        sum = t;
    }
    r.phi = sum + carry;
    return r;
}

double bracket_theta(const SurfaceCurrents& c, std::size_t i, double eta, double ct, double cp, double sp)
{
    return eta * ct * cp * std::abs(c.je_x[i]) + eta * ct * sp * std::abs(c.je_y[i]) - sp * std::abs(c.jm_x[i]) +
           cp * std::abs(c.jm_y[i]);
}

double bracket_phi(const SurfaceCurrents& c, std::size_t i, double eta, double ct, double cp, double sp)
{
    return -eta * sp * std::abs(c.je_x[i]) + eta * cp * std::abs(c.je_y[i]) + ct * cp * std::abs(c.jm_x[i]) +
           ct * sp * std::abs(c.jm_y[i]);
}

} // namespace

ReflectionLookupTable::ReflectionLookupTable(std::vector<TableEntry> entries) : entries_(std::move(entries))
{
    if (entries_.size() < 2) throw Error(ErrorKind::config, "lookup table needs at least two entries");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!std::isfinite(e.g) || !std::isfinite(std::abs(e.gamma_xx)) || !std::isfinite(std::abs(e.gamma_yy)))
            throw Error(ErrorKind::config, "non-finite table entry");
        if (i > 0 && !(e.g > entries_[i - 1].g))
            throw Error(ErrorKind::config, "table geometry must be strictly increasing");
        if (std::abs(e.gamma_xx) > 1.0 + 1e-12 || std::abs(e.gamma_yy) > 1.0 + 1e-12)
            throw Error(ErrorKind::config, "table entry is not passive (|gamma| > 1)");
    }
}

ReflectionTensor ReflectionLookupTable::lookup(double g) const
{
    if (!(g >= g_min() && g <= g_max()))
        throw Error(ErrorKind::synthesis_domain, "geometry " + format_double(g) + " m is outside the table range");
    if (g == g_max()) return {entries_.back().gamma_xx, entries_.back().gamma_yy};
    const auto it = std::upper_bound(entries_.begin(), entries_.end(), g,
                                     [](double v, const TableEntry& e) { return v < e.g; });
    const TableEntry& lo = *(it - 1);
    const TableEntry& hi = *it;
    const double t = (g - lo.g) / (hi.g - lo.g);
    return {interpolate(lo.gamma_xx, hi.gamma_xx, t), interpolate(lo.gamma_yy, hi.gamma_yy, t)};
}

double ReflectionLookupTable::phase_span_yy() const
{
    double unwrapped = 0.0, lo = 0.0, hi = 0.0;
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        unwrapped += wrap_phase(std::arg(entries_[i].gamma_yy) - std::arg(entries_[i - 1].gamma_yy));
        lo = std::min(lo, unwrapped);
        hi = std::max(hi, unwrapped);
    }
    return hi - lo;
}

double ReflectionLookupTable::max_phase_gap_yy() const
{
    double gap = 0.0;
    for (std::size_t i = 1; i < entries_.size(); ++i)
        gap = std::max(gap, std::abs(wrap_phase(std::arg(entries_[i].gamma_yy) - std::arg(entries_[i - 1].gamma_yy))));
    return gap;
}

ReflectionLookupTable read_table_csv(std::istream& in, const std::string& source_name)
{
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::config, source_name + ": empty table");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "g_m,re_gamma_xx,im_gamma_xx,re_gamma_yy,im_gamma_yy")
        throw Error(ErrorKind::config, source_name + ":1: unexpected header '" + line + "'");
    std::vector<TableEntry> entries;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = source_name + ":" + std::to_string(line_no) + ": ";
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() != 5) throw Error(ErrorKind::config, where + "expected 5 columns");
        double v[5];
        for (int k = 0; k < 5; ++k) v[k] = parse_field(fields[k], where);
        entries.push_back({v[0], {v[1], v[2]}, {v[3], v[4]}});
    }
    try {
        return ReflectionLookupTable(std::move(entries));
    } catch (const Error& e) {
        throw Error(ErrorKind::config, source_name + ": " + e.what());
    }
}

ReflectionLookupTable load_table_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open table " + path.string());
    return read_table_csv(in, path.string());
}

void write_table_csv(std::ostream& out, const ReflectionLookupTable& table)
{
    out << "g_m,re_gamma_xx,im_gamma_xx,re_gamma_yy,im_gamma_yy\n";
    for (const auto& e : table.entries())
        out << format_double(e.g) << ',' << format_double(e.gamma_xx.real()) << ','
            << format_double(e.gamma_xx.imag()) << ',' << format_double(e.gamma_yy.real()) << ','
            << format_double(e.gamma_yy.imag()) << '\n';
}

ReflectionLookupTable synthetic_table(const SyntheticTableModel& model)
{
    if (model.u_count < 2) throw Error(ErrorKind::config, "synthetic table needs at least two entries");
    if (!(model.phase_span > 0.0 && model.phase_span <= 2.0 * pi))
        throw Error(ErrorKind::config, "phase span must lie in (0, 360] degrees");
    if (!(model.loss_db >= 0.0) || !std::isfinite(model.loss_db))
        throw Error(ErrorKind::config, "loss must be a non-negative number of dB");
    const double mag = std::pow(10.0, -model.loss_db / 20.0);
    const double a = s_curve_steepness;
    std::vector<TableEntry> e;
    for (std::size_t i = 0; i < model.u_count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(model.u_count - 1);
        const double g = i + 1 == model.u_count ? synthetic_g_max
                                                : synthetic_g_min + (synthetic_g_max - synthetic_g_min) * t;
        const double phase = pi - 0.5 * model.phase_span * std::tanh(a * (2.0 * t - 1.0)) / std::tanh(a);
        const cd gamma = std::polar(mag, phase);
        e.push_back({g, gamma, gamma});
    }
    return ReflectionLookupTable(std::move(e));
}

ReflectionLookupTable pec_table(double g_min, double g_max)
{
    return ReflectionLookupTable({{g_min, {-1.0, 0.0}, {-1.0, 0.0}}, {g_max, {-1.0, 0.0}, {-1.0, 0.0}}});
}

double wrap_phase(double x)
{
    double r = std::remainder(x, 2.0 * pi);
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

TargetPhases ideal_current_phases(const ApertureGrid& grid, const LinkScenario& scenario)
{
    const ObservationPoint rx = receiver_point(scenario);
    const double k = scenario.wavenumber();
    TargetPhases t{grid, std::vector<double>(grid.cells())};
    for (std::size_t q = 0; q < grid.q_count; ++q)
        for (std::size_t p = 0; p < grid.p_count; ++p)
            t.phase[grid.index(p, q)] = wrap_phase(-k * beta(grid.x(p), grid.y(q), rx));
    return t;
}

SurfaceCurrents gstc_currents(const EmsPanel& panel, const LinkScenario& scenario, const ModelOptions& options)
{
    if (!panel.d.consistent_with(panel.grid) || panel.d.b_count() != 1)
        throw Error(ErrorKind::inconsistency, "layout does not match the panel grid");
    const ApertureGrid& g = panel.grid;
    std::vector<ReflectionTensor> gamma(g.cells());
    for (std::size_t q = 0; q < g.q_count; ++q)
        for (std::size_t p = 0; p < g.p_count; ++p) gamma[g.index(p, q)] = panel.table.lookup(panel.d.g(p, q));
    const auto incident = cell_incident_fields(g, scenario, options.average);
    return sheet_currents(g, gamma, incident);
}

std::vector<CellResponse> cell_responses(const ApertureGrid& grid, const LinkScenario& scenario,
                                         const ModelOptions& options)
{
    const auto inc = cell_incident_fields(grid, scenario, options.average);
    const double w = std::cos(scenario.theta0) / free_space_impedance();
    std::vector<CellResponse> out(inc.size());
    // receiver-directed current j_e^y - cos(theta0) j_m^x / eta
    for (std::size_t i = 0; i < inc.size(); ++i)
        out[i] = {inc[i].h_x - w * inc[i].e_y, -(inc[i].h_x + w * inc[i].e_y)};
    return out;
}

double predicted_phase(const CellResponse& cell, cd gamma_yy) { return std::arg(cell.a + cell.b * gamma_yy); }

SynthesisResult synthesize_layout(const ApertureGrid& grid, const ReflectionLookupTable& table,
                                  const TargetPhases& targets, const LinkScenario& scenario,
                                  const ModelOptions& options)
{
    return synthesize(grid, table, targets, scenario, options, best_windowed);
}

SynthesisResult synthesize_layout_exhaustive(const ApertureGrid& grid, const ReflectionLookupTable& table,
                                             const TargetPhases& targets, const LinkScenario& scenario,
                                             const ModelOptions& options)
{
    return synthesize(grid, table, targets, scenario, options, best_exhaustive);
}

EmsDesign design_ems(const LinkScenario& scenario, double side_l, const ReflectionLookupTable& table,
                     const ModelOptions& options)
{
    const ApertureGrid grid = discretize(side_l, scenario.default_pitch(), options.origin);
    SynthesisResult s = synthesize_layout(grid, table, ideal_current_phases(grid, scenario), scenario, options);
    EmsPanel panel{grid, s.layout, table};
    return {std::move(panel), std::move(s)};
}

double ems_tpa(const LinkScenario& scenario, const EmsPanel& panel, const ModelOptions& options)
{
    check_fresnel(panel.grid, scenario, options.strict_fresnel);
    return tpa_from_currents(gstc_currents(panel, scenario, options), scenario);
}

double ems_received_power_matched(const SurfaceCurrents& currents, const LinkScenario& scenario)
{
    currents.validate();
    const double eta = free_space_impedance();
    const double ct = std::cos(scenario.theta0), cp = std::cos(scenario.phi_rx), sp = std::sin(scenario.phi_rx);
    double sum = 0.0;
    for (std::size_t i = 0; i < currents.grid.cells(); ++i) {
        const double bt = bracket_theta(currents, i, eta, ct, cp, sp);
        const double bp = bracket_phi(currents, i, eta, ct, cp, sp);
        sum += bt * bt + bp * bp;
    }
    return scenario.g_rx / (32.0 * pi * eta * scenario.r_rx * scenario.r_rx) * sum;
}

double ems_received_power_matched_coherent(const SurfaceCurrents& currents, const LinkScenario& scenario)
{
    currents.validate();
    const double eta = free_space_impedance();
    const double st = std::sin(scenario.theta0), ct = std::cos(scenario.theta0);
    const double cp = std::cos(scenario.phi_rx), sp = std::sin(scenario.phi_rx);
    double sum_t = 0.0, sum_p = 0.0;
    for (std::size_t i = 0; i < currents.grid.cells(); ++i) {
        sum_t += bracket_theta(currents, i, eta, ct, cp, sp);
        sum_p += bracket_phi(currents, i, eta, ct, cp, sp);
    }
    const double d = currents.grid.pitch;
    const double el = sinc(pi * d * st * cp / scenario.lambda) * sinc(pi * d * st * sp / scenario.lambda);
    return scenario.g_rx / (32.0 * pi * eta * scenario.r_rx * scenario.r_rx) * d * d * d * d * el * el *
           (sum_t * sum_t + sum_p * sum_p);
}

double ems_upper_bound_tpa(const LinkScenario& scenario, double side_l)
{
    if (!(side_l > 0.0)) throw Error(ErrorKind::domain, "panel side must be positive");
    const double c = std::cos(scenario.theta0);
    const double l2 = side_l * side_l;
    const double den = 4.0 * pi * scenario.r_tx * scenario.r_rx;
    return scenario.g_tx * scenario.g_rx * c * c * l2 * l2 / (den * den);
}

std::size_t layout_ring_count(const DescriptorVector& d, const ReflectionLookupTable& table)
{
    const double jump = 0.5 * (table.g_max() - table.g_min());
    const std::size_t q = d.q_count() / 2;
    std::size_t rings = 0;
    for (std::size_t p = 1; p < d.p_count(); ++p)
        if (std::abs(d.g(p, q) - d.g(p - 1, q)) > jump) ++rings;
    return rings;
}

} // namespace skinlink
