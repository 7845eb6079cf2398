#pragma once

#include "skinlink/sheet.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace skinlink {

struct TableEntry {
    double g = 0.0;  // m
    cd gamma_xx{};
    cd gamma_yy{};
};

class ReflectionLookupTable {
public:
    explicit ReflectionLookupTable(std::vector<TableEntry> entries);

    const std::vector<TableEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    double g_min() const { return entries_.front().g; }
    double g_max() const { return entries_.back().g; }

    // Magnitude interpolated linearly, phase along the shorter arc. Exact at entries.
    ReflectionTensor lookup(double g) const;

    // total phase travelled by gamma_yy across the table [rad]
    double phase_span_yy() const;
    double max_phase_gap_yy() const;

private:
    std::vector<TableEntry> entries_;
};

ReflectionLookupTable read_table_csv(std::istream& in, const std::string& source_name = "<stream>");
ReflectionLookupTable load_table_csv(const std::filesystem::path& path);
void write_table_csv(std::ostream& out, const ReflectionLookupTable& table);

struct SyntheticTableModel {
    std::size_t u_count = 64;
    double phase_span = 300.0 * pi / 180.0;  // rad
    double loss_db = 0.0;
};

inline constexpr double synthetic_g_min = 0.3e-3;
inline constexpr double synthetic_g_max = 5.0e-3;

ReflectionLookupTable synthetic_table(const SyntheticTableModel& model = {});

// every entry is a perfect conductor
ReflectionLookupTable pec_table(double g_min = synthetic_g_min, double g_max = synthetic_g_max);

// (-pi, pi]
double wrap_phase(double x);

struct TargetPhases {
    ApertureGrid grid;
    std::vector<double> phase;  // grid.index(p, q)
};

TargetPhases ideal_current_phases(const ApertureGrid& grid, const LinkScenario& scenario);

struct EmsPanel {
    ApertureGrid grid;
    DescriptorVector d;
    ReflectionLookupTable table;
};

SurfaceCurrents gstc_currents(const EmsPanel& panel, const LinkScenario& scenario,
                              const ModelOptions& options = {});

// Current radiated toward the receiver by one cell, j_eff = a + b*gamma_yy.
struct CellResponse {
    cd a;
    cd b;
};

std::vector<CellResponse> cell_responses(const ApertureGrid& grid, const LinkScenario& scenario,
                                         const ModelOptions& options = {});
double predicted_phase(const CellResponse& cell, cd gamma_yy);

struct SynthesisResult {
    DescriptorVector layout;
    std::vector<double> cell_mismatch;  // squared wrapped phase error per cell
    double phi = 0.0;                   // sum of cell_mismatch
};

inline constexpr double synthesis_resolution = 1e-6;  // m

SynthesisResult synthesize_layout(const ApertureGrid& grid, const ReflectionLookupTable& table,
                                  const TargetPhases& targets, const LinkScenario& scenario,
                                  const ModelOptions& options = {});

// Exhaustive scan of every candidate g; reference for synthesize_layout.
SynthesisResult synthesize_layout_exhaustive(const ApertureGrid& grid,
                                             const ReflectionLookupTable& table,
                                             const TargetPhases& targets,
                                             const LinkScenario& scenario,
                                             const ModelOptions& options = {});

struct EmsDesign {
    EmsPanel panel;
    SynthesisResult synthesis;
};

EmsDesign design_ems(const LinkScenario& scenario, double side_l, const ReflectionLookupTable& table,
                     const ModelOptions& options = {});

double ems_tpa(const LinkScenario& scenario, const EmsPanel& panel, const ModelOptions& options = {});

// Matched-phase power summed literally cell by cell, without pitch or element factors.
double ems_received_power_matched(const SurfaceCurrents& currents, const LinkScenario& scenario);
// Same coherent sum with the cell area and element factor restored.
double ems_received_power_matched_coherent(const SurfaceCurrents& currents,
                                           const LinkScenario& scenario);

double ems_upper_bound_tpa(const LinkScenario& scenario, double side_l);

// count of 2*pi phase wraps crossed along the central row of a layout
std::size_t layout_ring_count(const DescriptorVector& d, const ReflectionLookupTable& table);

} // namespace skinlink
