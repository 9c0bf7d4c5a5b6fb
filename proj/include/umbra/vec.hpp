#pragma once

#include <array>
#include <cmath>

namespace umbra {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    constexpr double norm2() const { return dot(*this); }
    Vec3 normalized() const { return *this / norm(); }

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Angle between two unit vectors, safe against roundoff outside [-1, 1].
inline double unit_angle(const Vec3& a, const Vec3& b) {
    double c = a.dot(b);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return std::acos(c);
}

/// Geodesic distance from u to the nearer of {v, -v}, both unit.
inline double axis_angle(const Vec3& u, const Vec3& v) {
    double c = std::fabs(u.dot(v));
    if (c > 1.0) c = 1.0;
    return std::acos(c);
}

// Row-major 3x3 matrix. Only what the tool needs: products, determinant,
// adjugate-based inverse and solve.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return {}; }
    static Mat3 diagonal(double a, double b, double c) {
        Mat3 r;
        r.m = {a, 0, 0, 0, b, 0, 0, 0, c};
        return r;
    }
    static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        Mat3 r;
        r.m = {r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z};
        return r;
    }

    double operator()(int i, int j) const { return m[3 * i + j]; }
    double& operator()(int i, int j) { return m[3 * i + j]; }

    Vec3 row(int i) const { return {m[3 * i], m[3 * i + 1], m[3 * i + 2]}; }
    Vec3 col(int j) const { return {m[j], m[3 + j], m[6 + j]}; }

    Vec3 operator*(const Vec3& v) const {
        return {row(0).dot(v), row(1).dot(v), row(2).dot(v)};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r(i, j) = row(i).dot(o.col(j));
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }

    Mat3 adjugate() const {
        Mat3 r;
        r.m = {m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
               m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
               m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
        return r;
    }

    /// Inverse via adjugate; caller checks det() first.
    Mat3 inverse() const {
        Mat3 a = adjugate();
        double d = det();
        for (double& v : a.m) v /= d;
        return a;
    }

    /// Solve (*this) x = b, assuming the caller checked det().
    Vec3 solve(const Vec3& b) const { return inverse() * b; }

    double frobenius() const {
        double s = 0;
        for (double v : m) s += v * v;
        return std::sqrt(s);
    }
};

}  // namespace umbra
