#pragma once

#include <cmath>
#include <complex>

namespace skinlink {

using cd = std::complex<double>;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct CVec3 {
    cd x{};
    cd y{};
    cd z{};

    friend CVec3 operator+(const CVec3& a, const CVec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend CVec3 operator*(cd s, const CVec3& a) { return {s * a.x, s * a.y, s * a.z}; }
};

inline double norm(const CVec3& a) { return std::sqrt(std::norm(a.x) + std::norm(a.y) + std::norm(a.z)); }
inline cd dot(const CVec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// real × complex cross product
inline CVec3 cross(const Vec3& a, const CVec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline CVec3 cross(const CVec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

} // namespace skinlink
