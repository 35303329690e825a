#pragma once

// Locating points of compact convex sets through their support functions
// sigma_C(d) = sup { <d, x> : x in C }.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "compass/compass.hpp"
#include "compass/error.hpp"
#include "compass/hull.hpp"
#include "compass/linalg.hpp"
#include "compass/sampling.hpp"

namespace compass {

class SupportOracle {
public:
    using SigmaFn = std::function<double(std::span<const double>)>;

    SupportOracle(std::size_t dim, SigmaFn sigma, std::string description)
        : dim_(dim), sigma_(std::move(sigma)), description_(std::move(description)) {
        if (dim_ == 0) throw ArgumentError("support oracle dimension must be positive");
    }

    std::size_t dim() const noexcept { return dim_; }
    const std::string& description() const noexcept { return description_; }

    double operator()(std::span<const double> d) const {
        require_dim(d, dim_, "direction");
        return sigma_(d);
    }

    /// Vertex list when the oracle was built from a finite polytope; empty otherwise.
    const std::vector<Vector>& vertices() const noexcept { return vertices_; }

private:
    friend SupportOracle polytope_support(std::vector<Vector> vertices);

    std::size_t dim_;
    SigmaFn sigma_;
    std::string description_;
    std::vector<Vector> vertices_;
};

/// sigma(d) = max_v <d, v> over the given vertices.
inline SupportOracle polytope_support(std::vector<Vector> vertices) {
    if (vertices.empty()) throw ArgumentError("polytope needs at least one vertex");
    const std::size_t n = vertices[0].size();
    if (n == 0) throw ArgumentError("polytope vertices must have positive dimension");
    for (const Vector& v : vertices) {
        if (v.size() != n) throw ArgumentError("polytope vertices have mixed dimensions");
        if (!all_finite(v)) throw ArgumentError("polytope vertex is not finite");
    }
    SupportOracle o(
        n,
        [vertices](std::span<const double> d) {
            double best = -std::numeric_limits<double>::infinity();
            for (const Vector& v : vertices) best = std::max(best, dot(d, v));
            return best;
        },
        "polytope with " + std::to_string(vertices.size()) + " vertices");
    o.vertices_ = std::move(vertices);
    return o;
}

/// Closed Euclidean ball: sigma(d) = <d, c> + r ||d||.
inline SupportOracle ball_support(Vector center, double radius) {
    const std::size_t n = center.size();
    return SupportOracle(
        n, [center, radius](std::span<const double> d) { return dot(d, center) + radius * norm(d); },
        "ball of radius " + std::to_string(radius));
}

struct IntervalHull {
    Vector lower;
    Vector upper;

    Vector midpoint() const {
        Vector m(lower.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (lower[i] + upper[i]);
        return m;
    }
};

/// Smallest enclosing box from 2n support evaluations: [-sigma(-e_i), sigma(e_i)].
inline IntervalHull interval_hull(const SupportOracle& c) {
    const std::size_t n = c.dim();
    IntervalHull h{Vector(n), Vector(n)};
    for (std::size_t i = 0; i < n; ++i) {
        double up = c(unit_vector(n, i, 1.0));
        double down = c(unit_vector(n, i, -1.0));
        if (!std::isfinite(up) || !std::isfinite(down)) throw NumericalError("unbounded or empty set");
        h.upper[i] = up;
        h.lower[i] = -down;
    }
    return h;
}

struct MidpointElement {
    Vector point;
    IntervalHull hull;
    Guarantee guarantee = Guarantee::Unguaranteed;
};

/// Midpoint of the interval hull. For a compact convex set in the plane this
/// point always belongs to the set (it is the compass difference of sigma at 0);
/// in three or more dimensions it may not. Convexity and compactness of a
/// black-box sigma are assumed, not checked.
inline MidpointElement midpoint_element(const SupportOracle& c) {
    MidpointElement m;
    m.hull = interval_hull(c);
    m.point = m.hull.midpoint();
    m.guarantee = c.dim() == 2 ? Guarantee::Guaranteed : Guarantee::Unguaranteed;
    return m;
}

struct SetMembership {
    bool member = false;
    std::size_t directions = 0;
    Vector witness;                     // direction of largest <d,p> - sigma(d)
    double max_violation = -std::numeric_limits<double>::infinity();
    std::string note;
};

/// Sampled separation test: p is rejected when <d, p> > sigma(d) + tol for one
/// of `directions` deterministic unit directions. Acceptance is only a sampled
/// certificate.
inline SetMembership membership_check(const SupportOracle& c, std::span<const double> p,
                                      std::size_t directions = 360, double tol = 1e-9) {
    if (directions < 8) throw ArgumentError("membership check needs at least 8 directions");
    require_dim(p, c.dim(), "point");
    SetMembership r;
    auto dirs = sphere_directions(c.dim(), directions);
    r.directions = dirs.size();
    for (const Vector& d : dirs) {
        double v = dot(d, p) - c(d);
        if (v > r.max_violation) {
            r.max_violation = v;
            r.witness = d;
        }
    }
    r.member = r.max_violation <= tol;
    r.note = r.member ? "no separation found among " + std::to_string(r.directions) + " directions"
                      : "separated by witness direction " + to_string(r.witness);
    return r;
}

/// Exact point-in-polygon test against the convex hull of planar vertices.
inline bool point_in_polygon(std::span<const Vector> vertices, std::span<const double> p, double tol = 1e-12) {
    for (const Vector& v : vertices) require_dim(v, 2, "polygon vertex");
    require_dim(p, 2, "point");
    auto h = convex_hull_2d(std::vector<Vector>(vertices.begin(), vertices.end()));
    return in_convex_polygon(h, p, tol);
}

/// Three support probes sigma(u) = sigma(v) = sigma(w) = 1 bound the triangle
/// T = {x : <u,x> <= 1, <v,x> <= 1, <w,x> <= 1}. Each edge of T is itself a
/// compact convex set with those same three support values, and the three
/// edges share no common point.
struct AmbiguityCertificate {
    std::array<Vector, 3> probes;
    std::array<Vector, 3> vertices;               // a = L_u/L_v, b = L_v/L_w, c = L_w/L_u
    std::array<std::array<Vector, 2>, 3> edges;   // T1 = [a,b], T2 = [b,c], T3 = [a,c]
    std::array<std::array<double, 3>, 3> support; // support[i][j] = sigma_{T_i}(probe_j)
    bool support_matches = false;
    bool triple_intersection_empty = false;

    bool ok() const { return support_matches && triple_intersection_empty; }
};

inline AmbiguityCertificate three_probe_ambiguity(const Vector& u, const Vector& v, const Vector& w,
                                                  double tol = 1e-10) {
    for (const Vector* p : {&u, &v, &w}) {
        require_dim(*p, 2, "probe");
        if (norm(*p) == 0.0) throw ArgumentError("probes must be nonzero");
    }
    auto cross = [](const Vector& a, const Vector& b) { return a[0] * b[1] - a[1] * b[0]; };
    auto meet = [&](const Vector& a, const Vector& b) -> Vector {
        double det = cross(a, b);
        if (std::abs(det) <= 1e-12 * norm(a) * norm(b)) throw ArgumentError("probes must be pairwise non-parallel");
        // <a,x> = 1, <b,x> = 1
        return {(b[1] - a[1]) / det, (a[0] - b[0]) / det};
    };
    AmbiguityCertificate c;
    c.probes = {u, v, w};
    Vector a = meet(u, v), b = meet(v, w), cc = meet(w, u);
    // T is bounded iff the normals positively span the plane: w = alpha u + beta v
    // with alpha, beta < 0.
    double det = cross(u, v);
    double alpha = cross(w, v) / det;
    double beta = cross(u, w) / det;
    if (!(alpha < 0.0 && beta < 0.0)) throw ArgumentError("probes do not bound a triangle");

    c.vertices = {a, b, cc};
    c.edges = {{{a, b}, {b, cc}, {a, cc}}};
    c.support_matches = true;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const Vector& d = c.probes[j];
            c.support[i][j] = std::max(dot(d, c.edges[i][0]), dot(d, c.edges[i][1]));
            if (std::abs(c.support[i][j] - 1.0) > tol) c.support_matches = false;
        }
    }
    // Two distinct edges of a triangle meet only in their shared vertex, so the
    // triple intersection is empty iff no vertex lies on its opposite edge.
    bool distinct = distance(a, b) > tol && distance(b, cc) > tol && distance(a, cc) > tol;
    bool off_opposite = detail::segment_distance(a, b, cc) > tol && detail::segment_distance(b, a, cc) > tol &&
                        detail::segment_distance(cc, a, b) > tol;
    c.triple_intersection_empty = distinct && off_opposite;
    return c;
}

}  // namespace compass
