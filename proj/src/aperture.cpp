#include "skinlink/aperture.hpp"

#include "skinlink/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace skinlink {

double ApertureGrid::x(std::size_t p) const
{
    const double shift = origin == CellOrigin::centered ? pitch / 2.0 : 0.0;
    return -side_l / 2.0 + static_cast<double>(p) * pitch + shift;
}

double ApertureGrid::y(std::size_t q) const
{
    const double shift = origin == CellOrigin::centered ? pitch / 2.0 : 0.0;
    return -side_l / 2.0 + static_cast<double>(q) * pitch + shift;
}

ApertureGrid discretize(double side_l, double pitch, CellOrigin origin)
{
    if (!(pitch > 0.0) || !std::isfinite(pitch)) throw Error(ErrorKind::domain, "cell pitch must be positive");
    if (!(side_l > 0.0) || !std::isfinite(side_l)) throw Error(ErrorKind::domain, "panel side must be positive");
    if (side_l < pitch)
        throw Error(ErrorKind::degenerate_aperture, "panel side is smaller than one cell");
    const auto n = static_cast<std::size_t>(std::llround(side_l / pitch));
    ApertureGrid g;
    g.pitch = pitch;
    g.p_count = g.q_count = n;
    g.side_l = static_cast<double>(n) * pitch;
    g.origin = origin;
    return g;
}

std::size_t descriptor_index(std::size_t b, std::size_t p, std::size_t q, std::size_t b_count,
                             std::size_t q_count)
{
    return 1 + b + (p + q * q_count) * b_count;
}

DescriptorIndex descriptor_decode(std::size_t s, std::size_t b_count, std::size_t q_count)
{
    if (s == 0) throw Error(ErrorKind::domain, "index 0 holds the panel side");
    const std::size_t flat = s - 1;
    const std::size_t cell = flat / b_count;
    return {flat % b_count, cell % q_count, cell / q_count};
}

DescriptorVector::DescriptorVector(double side_l, std::size_t p_count, std::size_t q_count,
                                   std::size_t b_count, double fill)
    : side_l_(side_l), p_count_(p_count), q_count_(q_count), b_count_(b_count),
      geometry_(b_count * p_count * q_count, fill)
{
    if (b_count == 0 || p_count == 0 || q_count == 0)
        throw Error(ErrorKind::inconsistency, "descriptor vector needs at least one cell and one parameter");
}

double DescriptorVector::operator[](std::size_t s) const
{
    if (s >= size()) throw Error(ErrorKind::domain, "descriptor index out of range");
    return s == 0 ? side_l_ : geometry_[s - 1];
}

double DescriptorVector::g(std::size_t p, std::size_t q, std::size_t b) const
{
    return geometry_[descriptor_index(b, p, q, b_count_, q_count_) - 1];
}

void DescriptorVector::set_g(std::size_t p, std::size_t q, std::size_t b, double value)
{
    geometry_[descriptor_index(b, p, q, b_count_, q_count_) - 1] = value;
}

bool DescriptorVector::consistent_with(const ApertureGrid& grid) const
{
    return p_count_ == grid.p_count && q_count_ == grid.q_count &&
           std::abs(side_l_ - grid.side_l) <= 1e-12 * grid.side_l;
}

nlohmann::json export_layout(const DescriptorVector& d, const ApertureGrid& grid, const LayoutMeta& meta)
{
    if (!d.consistent_with(grid) || d.size() != 1 + d.b_count() * grid.cells())
        throw Error(ErrorKind::inconsistency, "descriptor vector does not match the grid");
    nlohmann::json doc;
    doc["meta"] = {{"f_hz", meta.f_hz},
                   {"L_m", d.side_l()},
                   {"delta_m", grid.pitch},
                   {"B", d.b_count()},
                   {"P", grid.p_count},
                   {"Q", grid.q_count},
                   {"scenario_hash", meta.scenario_hash}};
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t p = 0; p < grid.p_count; ++p) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t q = 0; q < grid.q_count; ++q) {
            if (d.b_count() == 1) {
                row.push_back(d.g(p, q));
            } else {
                nlohmann::json cell = nlohmann::json::array();
                for (std::size_t b = 0; b < d.b_count(); ++b) cell.push_back(d.g(p, q, b));
                row.push_back(cell);
            }
        }
        rows.push_back(std::move(row));
    }
    doc["cells"] = std::move(rows);
    return doc;
}

DescriptorVector import_layout(const nlohmann::json& doc)
{
    try {
        const auto& meta = doc.at("meta");
        const auto& cells = doc.at("cells");
        const double side = meta.at("L_m").get<double>();
        const auto b_count = meta.at("B").get<std::size_t>();
        const std::size_t p_count = cells.size();
        if (p_count == 0) throw Error(ErrorKind::inconsistency, "layout has no cells");
        const std::size_t q_count = cells.at(0).size();
        DescriptorVector d(side, p_count, q_count, b_count, 0.0);
        for (std::size_t p = 0; p < p_count; ++p) {
            const auto& row = cells.at(p);
            if (row.size() != q_count) throw Error(ErrorKind::inconsistency, "ragged layout matrix");
            for (std::size_t q = 0; q < q_count; ++q) {
                if (b_count == 1) {
                    d.set_g(p, q, 0, row.at(q).get<double>());
                } else {
                    const auto& cell = row.at(q);
                    if (cell.size() != b_count) throw Error(ErrorKind::inconsistency, "wrong descriptor count");
                    for (std::size_t b = 0; b < b_count; ++b) d.set_g(p, q, b, cell.at(b).get<double>());
                }
            }
        }
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::inconsistency, std::string("malformed layout: ") + e.what());
    }
}

std::string dump_layout(const nlohmann::json& doc) { return doc.dump(1) + "\n"; }

void write_layout_file(const std::filesystem::path& path, const nlohmann::json& doc)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::config, "cannot write " + path.string());
    out << dump_layout(doc);
}

nlohmann::json read_layout_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::inconsistency, path.string() + ": " + e.what());
    }
}

} // namespace skinlink
