#pragma once

#include "skinlink/aperture.hpp"
#include "skinlink/scenario.hpp"
#include "skinlink/vec.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace skinlink {

struct SurfaceCurrents {
    ApertureGrid grid;
    // indexed by grid.index(p, q)
    std::vector<cd> je_x;
    std::vector<cd> je_y;
    std::vector<cd> jm_x;
    std::vector<cd> jm_y;

    static SurfaceCurrents zeros(const ApertureGrid& grid);
    void validate() const;
};

struct ObservationPoint {
    double r = 0.0;
    double theta = 0.0;
    double phi = 0.0;

    static ObservationPoint from_cartesian(const Vec3& p);
    Vec3 to_cartesian() const;
};

struct ScatteredField {
    cd e_theta{};
    cd e_phi{};

    double magnitude() const;
};

double sinc(double x);

double beta(double x, double y, const ObservationPoint& obs);

ScatteredField scattered_field(const SurfaceCurrents& currents, const ObservationPoint& obs,
                               double lambda, double eta);

double received_power(const ScatteredField& field, double g_rx, double lambda, double eta);

double fresnel_min_distance(double side_l, double lambda);
bool fresnel_ok(double side_l, double lambda, double r);

enum class OracleKernel {
    spherical,  // exact distance and direction per sub-patch
    fresnel,    // panel-centered direction, quadratic phase
};

// Brute-force radiation integral: every cell split into subdivisions^2 patches,
// each radiating as a point source with its own vector geometry.
ScatteredField quadrature_oracle(const SurfaceCurrents& currents, const ObservationPoint& obs,
                                 double lambda, double eta, int subdivisions,
                                 OracleKernel kernel = OracleKernel::spherical);

enum class CutPlane {
    transversal,   // z'' = 0
    longitudinal,  // y'' = 0
};

CutPlane parse_cut_plane(const std::string& name);
const char* cut_plane_name(CutPlane plane);

struct CutSpec {
    CutPlane plane = CutPlane::transversal;
    double half_extent = 0.0;  // m, along both in-plane axes
    std::size_t points = 1;    // per axis
};

struct ReceiverFrame {
    Vec3 origin;
    Vec3 x;
    Vec3 y;
    Vec3 z;  // points from panel center to the receiver
};

ReceiverFrame receiver_frame(const LinkScenario& scenario);

struct FieldCut {
    CutSpec spec;
    std::vector<double> u;  // first in-plane axis (x'')
    std::vector<double> v;  // y'' or z''
    // row-major, v outer
    std::vector<double> e_phi_abs;
    std::vector<double> e_total_abs;
    std::size_t below_fresnel = 0;

    std::size_t peak_index() const;
};

FieldCut field_cut_map(const SurfaceCurrents& currents, const CutSpec& cut,
                       const LinkScenario& scenario, bool strict_fresnel = false);

void write_field_cut_csv(std::ostream& out, const FieldCut& cut);

} // namespace skinlink
