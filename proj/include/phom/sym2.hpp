#pragma once

#include <array>
#include <cmath>

namespace phom {

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Sym2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    static constexpr Sym2 identity() { return {1.0, 0.0, 1.0}; }
    static constexpr Sym2 diag(double d1, double d2) { return {d1, 0.0, d2}; }
    /// Rank-one matrix v v^T.
    static constexpr Sym2 outer(std::array<double, 2> v) {
        return {v[0] * v[0], v[0] * v[1], v[1] * v[1]};
    }

    constexpr double trace() const { return a11 + a22; }
    constexpr double det() const { return a11 * a22 - a12 * a12; }
    double norm() const { return std::sqrt(a11 * a11 + 2.0 * a12 * a12 + a22 * a22); }
    /// v^T Q v
    constexpr double quad(double v0, double v1) const {
        return a11 * v0 * v0 + 2.0 * a12 * v0 * v1 + a22 * v1 * v1;
    }

    constexpr Sym2 &operator+=(const Sym2 &o) {
        a11 += o.a11;
        a12 += o.a12;
        a22 += o.a22;
        return *this;
    }
    constexpr Sym2 &operator-=(const Sym2 &o) {
        a11 -= o.a11;
        a12 -= o.a12;
        a22 -= o.a22;
        return *this;
    }
    constexpr Sym2 &operator*=(double s) {
        a11 *= s;
        a12 *= s;
        a22 *= s;
        return *this;
    }
    friend constexpr Sym2 operator+(Sym2 a, const Sym2 &b) { return a += b; }
    friend constexpr Sym2 operator-(Sym2 a, const Sym2 &b) { return a -= b; }
    friend constexpr Sym2 operator*(double s, Sym2 a) { return a *= s; }
    friend constexpr Sym2 operator*(Sym2 a, double s) { return a *= s; }
    friend constexpr bool operator==(const Sym2 &, const Sym2 &) = default;
};

/// Frobenius inner product A:B.
constexpr double frobenius(const Sym2 &a, const Sym2 &b) {
    return a.a11 * b.a11 + 2.0 * a.a12 * b.a12 + a.a22 * b.a22;
}

/// R^T Q R for the rotation by angle theta.
Sym2 rotate(const Sym2 &q, double theta);

struct EigenFrame {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::array<double, 2> v_min{1.0, 0.0};
    std::array<double, 2> v_max{0.0, 1.0};

    Sym2 reconstruct() const {
        return lambda_min * Sym2::outer(v_min) + lambda_max * Sym2::outer(v_max);
    }
    double gap() const { return lambda_max - lambda_min; }
};

/// Discriminant below which the eigenvalue is treated as repeated.
inline constexpr double kRepeatedEigenTol = 1e-14;

/// Closed-form spectral decomposition. Repeated eigenvalues get the axis frame.
EigenFrame eigen_decompose(const Sym2 &q);

/// Eigenvalues only; the hot path of every solver.
inline void eigenvalues(double a11, double a12, double a22, double &lmin, double &lmax) {
    const double m = 0.5 * (a11 + a22);
    const double d = 0.5 * (a11 - a22);
    const double r = std::sqrt(d * d + a12 * a12);
    lmin = m - r;
    lmax = m + r;
}

inline double positive_part(double t) { return t > 0.0 ? t : 0.0; }

}  // namespace phom
