// Planar vectors and 2x2 matrices for the two-body problem in the plane.
#pragma once

#include <cmath>

namespace keplerlab {

/// A point or direction in the orbital plane.
struct PlanarVector {
    double x1 = 0.0;
    double x2 = 0.0;

    constexpr PlanarVector& operator+=(const PlanarVector& o) {
        x1 += o.x1;
        x2 += o.x2;
        return *this;
    }
    constexpr PlanarVector& operator-=(const PlanarVector& o) {
        x1 -= o.x1;
        x2 -= o.x2;
        return *this;
    }
    constexpr PlanarVector& operator*=(double s) {
        x1 *= s;
        x2 *= s;
        return *this;
    }

    friend constexpr bool operator==(const PlanarVector&, const PlanarVector&) = default;
};

constexpr PlanarVector operator+(PlanarVector a, const PlanarVector& b) { return a += b; }
constexpr PlanarVector operator-(PlanarVector a, const PlanarVector& b) { return a -= b; }
constexpr PlanarVector operator-(const PlanarVector& a) { return {-a.x1, -a.x2}; }
constexpr PlanarVector operator*(double s, PlanarVector a) { return a *= s; }
constexpr PlanarVector operator*(PlanarVector a, double s) { return a *= s; }
constexpr PlanarVector operator/(const PlanarVector& a, double s) { return {a.x1 / s, a.x2 / s}; }

constexpr double dot(const PlanarVector& a, const PlanarVector& b) { return a.x1 * b.x1 + a.x2 * b.x2; }

/// z-component of the three-dimensional cross product.
constexpr double cross(const PlanarVector& a, const PlanarVector& b) { return a.x1 * b.x2 - a.x2 * b.x1; }

constexpr double norm_squared(const PlanarVector& a) { return dot(a, a); }
inline double norm(const PlanarVector& a) { return std::hypot(a.x1, a.x2); }

/// Counterclockwise rotation by `angle` radians.
inline PlanarVector rotated(const PlanarVector& a, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * a.x1 - s * a.x2, s * a.x1 + c * a.x2};
}

/// Counterclockwise rotation by a quarter turn.
constexpr PlanarVector perpendicular(const PlanarVector& a) { return {-a.x2, a.x1}; }

inline bool is_finite(const PlanarVector& a) { return std::isfinite(a.x1) && std::isfinite(a.x2); }

/// Row-major 2x2 matrix.
struct Matrix2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    static constexpr Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Matrix2 outer(const PlanarVector& u, const PlanarVector& v) {
        return {u.x1 * v.x1, u.x1 * v.x2, u.x2 * v.x1, u.x2 * v.x2};
    }

    constexpr double determinant() const { return a11 * a22 - a12 * a21; }

    friend constexpr bool operator==(const Matrix2&, const Matrix2&) = default;
};

constexpr Matrix2 operator+(const Matrix2& a, const Matrix2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
}
constexpr Matrix2 operator*(double s, const Matrix2& a) { return {s * a.a11, s * a.a12, s * a.a21, s * a.a22}; }
constexpr PlanarVector operator*(const Matrix2& m, const PlanarVector& v) {
    return {m.a11 * v.x1 + m.a12 * v.x2, m.a21 * v.x1 + m.a22 * v.x2};
}

/// Solves m * y = rhs by Cramer's rule; the caller guarantees det(m) != 0.
constexpr PlanarVector solve(const Matrix2& m, const PlanarVector& rhs) {
    const double det = m.determinant();
    return {(m.a22 * rhs.x1 - m.a12 * rhs.x2) / det, (m.a11 * rhs.x2 - m.a21 * rhs.x1) / det};
}

}  // namespace keplerlab
