#pragma once

// Exact (up to a distance tolerance) membership of a point in the convex hull
// of finitely many points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "compass/error.hpp"
#include "compass/linalg.hpp"

namespace compass {

namespace detail {

inline double cross2(const Vector& o, const Vector& a, const Vector& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline double segment_distance(std::span<const double> p, const Vector& a, const Vector& b) {
    Vector ab(a.size()), ap(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab[i] = b[i] - a[i];
        ap[i] = p[i] - a[i];
    }
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? std::clamp(dot(ap, ab) / len2, 0.0, 1.0) : 0.0;
    Vector q = axpy(t, ab, a);
    return distance(p, q);
}

/// Gaussian elimination with partial pivoting; false if numerically singular.
inline bool solve_dense(std::vector<Vector> a, Vector b, Vector& x) {
    const std::size_t n = b.size();
    double scale = 0.0;
    for (const Vector& row : a)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return n == 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) <= 1e-12 * scale) return false;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t c = n; c-- > 0;) {
        double s = b[c];
        for (std::size_t k = c + 1; k < n; ++k) s -= a[c][k] * x[k];
        x[c] = s / a[c][c];
    }
    return true;
}

/// Is p within `tol` of conv(points[idx...])? Least-squares barycentric fit.
inline bool in_simplex(std::span<const Vector> points, const std::vector<std::size_t>& idx,
                       std::span<const double> p, double tol) {
    const Vector& g0 = points[idx[0]];
    const std::size_t k = idx.size() - 1;
    const std::size_t n = g0.size();
    if (k == 0) return distance(p, g0) <= tol;
    std::vector<Vector> edges(k, Vector(n));
    Vector rhs(n);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) edges[j][i] = points[idx[j + 1]][i] - g0[i];
    for (std::size_t i = 0; i < n; ++i) rhs[i] = p[i] - g0[i];
    std::vector<Vector> gram(k, Vector(k));
    Vector b(k);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t c = 0; c < k; ++c) gram[a][c] = dot(edges[a], edges[c]);
        b[a] = dot(edges[a], rhs);
    }
    Vector lambda;
    if (!solve_dense(gram, b, lambda)) return false;
    double l0 = 1.0;
    for (double l : lambda) l0 -= l;
    constexpr double weight_tol = 1e-12;
    if (l0 < -weight_tol) return false;
    for (double l : lambda)
        if (l < -weight_tol) return false;
    Vector q = g0;
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) q[i] += lambda[j] * edges[j][i];
    return distance(p, q) <= tol;
}

}  // namespace detail

/// Convex hull of planar points, counter-clockwise, collinear points dropped.
inline std::vector<Vector> convex_hull_2d(std::vector<Vector> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vector> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && detail::cross2(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && detail::cross2(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

/// Point-in-convex-polygon test, with `tol` as the allowed outside distance.
/// Accepts degenerate hulls (a point or a segment).
inline bool in_convex_polygon(std::span<const Vector> hull_ccw, std::span<const double> p, double tol) {
    if (hull_ccw.empty()) throw ArgumentError("empty polygon");
    if (hull_ccw.size() == 1) return distance(p, hull_ccw[0]) <= tol;
    if (hull_ccw.size() == 2) return detail::segment_distance(p, hull_ccw[0], hull_ccw[1]) <= tol;
    const Vector pv(p.begin(), p.end());
    for (std::size_t i = 0; i < hull_ccw.size(); ++i) {
        const Vector& a = hull_ccw[i];
        const Vector& b = hull_ccw[(i + 1) % hull_ccw.size()];
        double len = distance(a, b);
        if (detail::cross2(a, b, pv) < -tol * len) return false;
    }
    return true;
}

/// Membership of p in conv(points) within distance `tol`. Planar input uses a
/// polygon test; other dimensions enumerate simplices of at most n+1 points,
/// which suffices by Caratheodory's theorem.
inline bool in_convex_hull(std::span<const Vector> points, std::span<const double> p, double tol) {
    if (points.empty()) throw ArgumentError("empty generator list");
    const std::size_t n = points[0].size();
    for (const Vector& g : points) require_dim(g, n, "generator");
    require_dim(p, n, "point");
    if (n == 1) {
        auto [lo, hi] = std::minmax_element(points.begin(), points.end());
        return p[0] >= (*lo)[0] - tol && p[0] <= (*hi)[0] + tol;
    }
    if (n == 2) {
        auto h = convex_hull_2d(std::vector<Vector>(points.begin(), points.end()));
        return in_convex_polygon(h, p, tol);
    }
    const std::size_t m = points.size();
    const std::size_t kmax = std::min(m, n + 1);
    std::vector<std::size_t> idx;
    // Enumerate all index subsets of size 1..kmax.
    for (std::size_t k = 1; k <= kmax; ++k) {
        idx.resize(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            if (detail::in_simplex(points, idx, p, tol)) return true;
            std::size_t i = k;
            while (i-- > 0 && idx[i] == m - k + i) {
            }
            if (i == static_cast<std::size_t>(-1)) break;
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return false;
}

}  // namespace compass
