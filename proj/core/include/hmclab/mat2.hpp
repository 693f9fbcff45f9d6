#pragma once

#include <array>
#include <cmath>

namespace hmclab {

/// Dense 2x2 matrix. The per-coordinate transition maps of the samplers
/// are 2x2, so this is all the linear algebra the library needs.
struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }

    Mat2 transpose() const { return {a11, a21, a12, a22}; }

    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }

    std::array<double, 2> operator*(const std::array<double, 2>& y) const {
        return {a11 * y[0] + a12 * y[1], a21 * y[0] + a22 * y[1]};
    }

    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }

    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }

    Mat2 scaled(double s) const { return {s * a11, s * a12, s * a21, s * a22}; }

    double max_abs() const {
        return std::max(std::max(std::abs(a11), std::abs(a12)),
                        std::max(std::abs(a21), std::abs(a22)));
    }
};

/// Eigenvalues of a symmetric 2x2 matrix, descending.
inline std::array<double, 2> sym_eigenvalues(const Mat2& m) {
    double mean = 0.5 * (m.a11 + m.a22);
    double off = 0.5 * (m.a11 - m.a22);
    double rad = std::sqrt(off * off + m.a12 * m.a21);
    return {mean + rad, mean - rad};
}

/// Moduli of the (possibly complex) eigenvalues of a general 2x2 matrix,
/// larger first.
inline std::array<double, 2> eigen_moduli(const Mat2& m) {
    double t = m.trace(), d = m.det();
    double disc = t * t - 4.0 * d;
    if (disc >= 0.0) {
        double s = std::sqrt(disc);
        double l1 = 0.5 * (t + s), l2 = 0.5 * (t - s);
        double m1 = std::abs(l1), m2 = std::abs(l2);
        return m1 >= m2 ? std::array<double, 2>{m1, m2} : std::array<double, 2>{m2, m1};
    }
    double mod = std::sqrt(d > 0 ? d : 0.25 * (t * t - disc));
    return {mod, mod};
}

}  // namespace hmclab
