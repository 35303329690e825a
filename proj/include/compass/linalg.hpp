#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "compass/error.hpp"

namespace compass {

using Vector = std::vector<double>;

/// Row-major 2x2 matrix; columns are the probe directions of a basis.
using Matrix2 = std::array<std::array<double, 2>, 2>;

inline constexpr Matrix2 kIdentity2{{{1.0, 0.0}, {0.0, 1.0}}};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
    Vector out(y.begin(), y.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += alpha * x[i];
    return out;
}

inline Vector scaled(double alpha, std::span<const double> x) {
    Vector out(x.begin(), x.end());
    for (double& v : out) v *= alpha;
    return out;
}

inline Vector unit_vector(std::size_t n, std::size_t i, double sign = 1.0) {
    Vector e(n, 0.0);
    e[i] = sign;
    return e;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline bool all_finite(std::span<const double> a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

inline Vector concat(std::span<const double> a, std::span<const double> b) {
    Vector out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline Vector column(const Matrix2& m, std::size_t j) { return {m[0][j], m[1][j]}; }

inline double determinant(const Matrix2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

/// Solves V^T s = z by Cramer's rule.
inline Vector solve_transposed(const Matrix2& v, std::span<const double> z) {
    // V^T = [[v00, v10], [v01, v11]]
    const double det = determinant(v);
    const double s0 = (z[0] * v[1][1] - v[1][0] * z[1]) / det;
    const double s1 = (v[0][0] * z[1] - z[0] * v[0][1]) / det;
    return {s0, s1};
}

inline std::string to_string(std::span<const double> v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        s += buf;
    }
    return s + ")";
}

inline void require_dim(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() != n)
        throw ArgumentError(std::string("dimension mismatch: ") + what + " has " +
                            std::to_string(v.size()) + " entries, expected " + std::to_string(n));
}

}  // namespace compass
