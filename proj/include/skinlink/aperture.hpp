#pragma once

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace skinlink {

enum class CellOrigin {
    edge,      // x_p = -L/2 + p*delta
    centered,  // shifted by delta/2
};

struct ApertureGrid {
    double side_l = 0.0;  // snapped to p_count * pitch
    double pitch = 0.0;
    std::size_t p_count = 0;
    std::size_t q_count = 0;
    CellOrigin origin = CellOrigin::edge;

    double x(std::size_t p) const;
    double y(std::size_t q) const;
    std::size_t cells() const { return p_count * q_count; }
    // storage order of per-cell arrays
    std::size_t index(std::size_t p, std::size_t q) const { return p + q * p_count; }
    double cell_area() const { return pitch * pitch; }
};

ApertureGrid discretize(double side_l, double pitch, CellOrigin origin = CellOrigin::edge);

struct DescriptorIndex {
    std::size_t b;
    std::size_t p;
    std::size_t q;
};

std::size_t descriptor_index(std::size_t b, std::size_t p, std::size_t q,
                             std::size_t b_count, std::size_t q_count);
DescriptorIndex descriptor_decode(std::size_t s, std::size_t b_count, std::size_t q_count);

class DescriptorVector {
public:
    DescriptorVector() = default;
    DescriptorVector(double side_l, std::size_t p_count, std::size_t q_count, std::size_t b_count,
                     double fill);

    double side_l() const { return side_l_; }
    std::size_t p_count() const { return p_count_; }
    std::size_t q_count() const { return q_count_; }
    std::size_t b_count() const { return b_count_; }
    std::size_t size() const { return 1 + geometry_.size(); }

    // d_s with d_0 = L
    double operator[](std::size_t s) const;
    double g(std::size_t p, std::size_t q, std::size_t b = 0) const;
    void set_g(std::size_t p, std::size_t q, std::size_t b, double value);
    void set_g(std::size_t p, std::size_t q, double value) { set_g(p, q, 0, value); }

    bool consistent_with(const ApertureGrid& grid) const;
    bool operator==(const DescriptorVector&) const = default;

private:
    double side_l_ = 0.0;
    std::size_t p_count_ = 0;
    std::size_t q_count_ = 0;
    std::size_t b_count_ = 1;
    std::vector<double> geometry_;
};

struct LayoutMeta {
    double f_hz = 0.0;
    std::string scenario_hash;
};

nlohmann::json export_layout(const DescriptorVector& d, const ApertureGrid& grid,
                             const LayoutMeta& meta = {});
DescriptorVector import_layout(const nlohmann::json& doc);

// 17 significant digits, so the text round-trips bit-exactly
std::string dump_layout(const nlohmann::json& doc);
void write_layout_file(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_layout_file(const std::filesystem::path& path);

} // namespace skinlink
