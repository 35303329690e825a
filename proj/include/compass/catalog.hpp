#pragma once

// Test functions with exact directional-derivative oracles and closed-form
// Clarke generalized gradients, plus the membership test used to check that a
// computed vector lies in such a gradient.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compass/error.hpp"
#include "compass/expr.hpp"
#include "compass/hull.hpp"
#include "compass/linalg.hpp"
#include "compass/sampling.hpp"

namespace compass {

/// A Clarke generalized gradient described either as conv(points) or as the
/// closed ball of `radius` around `center`.
struct GeneratorSet {
    std::vector<Vector> points;
    bool ball = false;
    Vector center;
    double radius = 0.0;

    static GeneratorSet hull(std::vector<Vector> pts) { return {std::move(pts), false, {}, 0.0}; }
    static GeneratorSet unit_ball(std::size_t n) { return {{}, true, Vector(n, 0.0), 1.0}; }
    static GeneratorSet closed_ball(Vector c, double r) { return {{}, true, std::move(c), r}; }
};

struct MembershipResult {
    bool member = false;
    bool sampled = false;             // support inequality held on every sampled direction
    std::optional<bool> exact;        // hull test; absent for the ball rule
    Vector worst_direction;
    double worst_gap = -std::numeric_limits<double>::infinity();  // max of <d,s> - sigma(d)
};

inline constexpr std::size_t kMembershipDirections = 360;

/// Is s in the set described by `gens`? For finite generators this requires
/// both <d, s> <= max_g <d, g> + tol on sampled unit directions and the exact
/// hull test. For the ball rule: ||s - center|| <= radius + tol.
inline MembershipResult clarke_membership_check(std::span<const double> s, const GeneratorSet& gens,
                                                double tol) {
    if (!(tol >= 0.0)) throw ArgumentError("tolerance must be nonnegative");
    MembershipResult r;
    if (gens.ball) {
        require_dim(s, gens.center.size(), "subgradient");
        double gap = distance(s, gens.center) - gens.radius;
        r.worst_gap = gap;
        r.sampled = r.member = gap <= tol;
        return r;
    }
    if (gens.points.empty()) throw ArgumentError("empty generator list");
    const std::size_t n = gens.points[0].size();
    require_dim(s, n, "subgradient");
    for (const Vector& d : sphere_directions(n, kMembershipDirections)) {
        double sigma = -std::numeric_limits<double>::infinity();
        for (const Vector& g : gens.points) sigma = std::max(sigma, dot(d, g));
        double gap = dot(d, s) - sigma;
        if (gap > r.worst_gap) {
            r.worst_gap = gap;
            r.worst_direction = d;
        }
    }
    r.sampled = r.worst_gap <= tol;
    r.exact = in_convex_hull(gens.points, s, tol);
    r.member = r.sampled && *r.exact;
    return r;
}

struct KnownPoint {
    Vector x;
    GeneratorSet generators;
};

struct CatalogEntry {
    std::string name;
    std::size_t dim = 0;
    Expr expr = Expr::constant(0.0);
    bool convex = false;
    std::vector<KnownPoint> known_points;
    /// Closed-form generalized gradient at any point of the domain.
    std::function<GeneratorSet(std::span<const double>)> clarke_generators;
    /// Known minimum value, when the function is bounded below and it is known.
    std::optional<double> minimum;
    /// Bound on |(f(x+td) - f(x))/t - f'(x;d)| / t for unit d away from kinks;
    /// absent for entries whose curvature is unbounded.
    std::optional<double> curvature_bound;

    DirectionalOracle oracle() const { return make_oracle(expr, dim); }
    double value(std::span<const double> x) const { return eval_value(expr, x); }
};

namespace detail {

/// Generators of max_k (<a_k, x> + b_k): gradients of the pieces attaining the max.
inline GeneratorSet max_affine_generators(const std::vector<Vector>& grads, const std::vector<double>& offsets,
                                          std::span<const double> x) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> vals;
    for (std::size_t k = 0; k < grads.size(); ++k) {
        vals.push_back(dot(grads[k], x) + offsets[k]);
        best = std::max(best, vals.back());
    }
    std::vector<Vector> active;
    for (std::size_t k = 0; k < grads.size(); ++k)
        if (vals[k] == best) active.push_back(grads[k]);
    return GeneratorSet::hull(std::move(active));
}

/// Sign set of a coordinate: {sign(t)}, or {-1, +1} at zero.
inline std::vector<double> sign_set(double t) {
    if (t > 0.0) return {1.0};
    if (t < 0.0) return {-1.0};
    return {-1.0, 1.0};
}

inline GeneratorSet shifted(GeneratorSet g, std::span<const double> shift) {
    for (Vector& p : g.points)
        for (std::size_t i = 0; i < p.size(); ++i) p[i] += shift[i];
    return g;
}

}  // namespace detail

inline CatalogEntry euclid_norm_2d() {
    CatalogEntry e;
    e.name = "euclid_norm_2d";
    e.dim = 2;
    e.expr = parse_expr("(norm (var 0) (var 1))");
    e.convex = true;
    e.minimum = 0.0;
    e.clarke_generators = [](std::span<const double> x) {
        double n = norm(x);
        if (n == 0.0) return GeneratorSet::unit_ball(2);
        return GeneratorSet::hull({{x[0] / n, x[1] / n}});
    };
    e.known_points = {{{0.0, 0.0}, GeneratorSet::unit_ball(2)}, {{3.0, 4.0}, GeneratorSet::hull({{0.6, 0.8}})}};
    return e;
}

/// x -> -|x_1|: nonconvex, generalized gradient [-1,1] x {0} on the x_2 axis.
inline CatalogEntry neg_abs_x1() {
    CatalogEntry e;
    e.name = "neg_abs_x1";
    e.dim = 2;
    e.expr = parse_expr("(neg (abs (var 0)))");
    e.convex = false;
    e.curvature_bound = 0.0;
    e.clarke_generators = [](std::span<const double> x) {
        std::vector<Vector> g;
        for (double s : detail::sign_set(x[0])) g.push_back({-s, 0.0});
        return GeneratorSet::hull(std::move(g));
    };
    for (Vector x : {Vector{0.0, 0.0}, Vector{0.0, 1.5}, Vector{0.0, -0.75}})
        e.known_points.push_back({x, e.clarke_generators(x)});
    return e;
}

/// x -> max(0, min(x_1, x_2)); its directional derivative at 0 is nonconvex.
inline CatalogEntry max0_min() {
    CatalogEntry e;
    e.name = "max0_min";
    e.dim = 2;
    e.expr = parse_expr("(max (const 0) (min (var 0) (var 1)))");
    e.convex = false;
    e.curvature_bound = 0.0;
    e.clarke_generators = [](std::span<const double> x) {
        const double m = std::min(x[0], x[1]);
        std::vector<Vector> g;
        if (m <= 0.0) g.push_back({0.0, 0.0});
        if (m >= 0.0) {
            if (x[0] == m) g.push_back({1.0, 0.0});
            if (x[1] == m) g.push_back({0.0, 1.0});
        }
        return GeneratorSet::hull(std::move(g));
    };
    for (Vector x : {Vector{0.0, 0.0}, Vector{0.0, 0.5}, Vector{0.5, 0.0}, Vector{0.3, 0.3}, Vector{0.0, -1.0}})
        e.known_points.push_back({x, e.clarke_generators(x)});
    return e;
}

inline CatalogEntry maxx1_0() {
    CatalogEntry e;
    e.name = "maxx1_0";
    e.dim = 2;
    e.expr = parse_expr("(max (var 0) (const 0))");
    e.convex = true;
    e.curvature_bound = 0.0;
    e.clarke_generators = [](std::span<const double> x) {
        return detail::max_affine_generators({{1.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0}, x);
    };
    for (Vector x : {Vector{0.0, 0.0}, Vector{0.0, -2.0}, Vector{0.0, 1.25}})
        e.known_points.push_back({x, e.clarke_generators(x)});
    return e;
}

/// |x_1| + |x_2|.
inline CatalogEntry abs_sum() {
    CatalogEntry e;
    e.name = "abs_sum";
    e.dim = 2;
    e.expr = parse_expr("(add (abs (var 0)) (abs (var 1)))");
    e.convex = true;
    e.minimum = 0.0;
    e.curvature_bound = 0.0;
    e.clarke_generators = [](std::span<const double> x) {
        std::vector<Vector> g;
        for (double a : detail::sign_set(x[0]))
            for (double b : detail::sign_set(x[1])) g.push_back({a, b});
        return GeneratorSet::hull(std::move(g));
    };
    for (Vector x : {Vector{0.0, 0.0}, Vector{0.0, 1.0}, Vector{-1.0, 0.0}})
        e.known_points.push_back({x, e.clarke_generators(x)});
    return e;
}

/// x_1^2 + x_1 x_2 + 2 x_2^2 + |x_1| (convex: the quadratic form is positive definite).
inline CatalogEntry quad_abs() {
    CatalogEntry e;
    e.name = "quad_abs";
    e.dim = 2;
    e.expr = parse_expr(
        "(add (mul (var 0) (var 0)) (mul (var 0) (var 1)) (scale 2 (mul (var 1) (var 1))) (abs (var 0)))");
    e.convex = true;
    e.minimum = 0.0;
    e.curvature_bound = 2.25;  // >= (3 + sqrt 2) / 2, half the top Hessian eigenvalue
    e.clarke_generators = [](std::span<const double> x) {
        Vector grad{2.0 * x[0] + x[1], x[0] + 4.0 * x[1]};
        std::vector<Vector> g;
        for (double s : detail::sign_set(x[0])) g.push_back({grad[0] + s, grad[1]});
        return GeneratorSet::hull(std::move(g));
    };
    for (Vector x : {Vector{0.0, 1.0}, Vector{0.0, 0.0}, Vector{0.0, -0.5}})
        e.known_points.push_back({x, e.clarke_generators(x)});
    return e;
}

/// (x_1 - 1)^2 + x_1 x_2 / 4 + x_2^2 / 2, smooth and strongly convex.
inline CatalogEntry smooth_quadratic() {
    CatalogEntry e;
    e.name = "smooth_quadratic";
    e.dim = 2;
    e.expr = parse_expr(
        "(add (mul (sub (var 0) (const 1)) (sub (var 0) (const 1))) (scale 0.25 (mul (var 0) (var 1))) "
        "(scale 0.5 (mul (var 1) (var 1))))");
    e.convex = true;
    e.curvature_bound = 1.1;
    e.clarke_generators = [](std::span<const double> x) {
        return GeneratorSet::hull({{2.0 * (x[0] - 1.0) + 0.25 * x[1], 0.25 * x[0] + x[1]}});
    };
    for (Vector x : {Vector{0.0, 0.0}, Vector{1.0, 0.0}})
        e.known_points.push_back({x, e.clarke_generators(x)});
    return e;
}

/// max(x_1, 0) + 0.1 ||x||^2.
inline CatalogEntry max_x1_quad() {
    CatalogEntry e;
    e.name = "max_x1_quad";
    e.dim = 2;
    e.expr = parse_expr("(add (max (var 0) (const 0)) (scale 0.1 (add (mul (var 0) (var 0)) (mul (var 1) (var 1)))))");
    e.convex = true;
    e.minimum = 0.0;
    e.curvature_bound = 0.1;
    e.clarke_generators = [](std::span<const double> x) {
        Vector grad{0.2 * x[0], 0.2 * x[1]};
        return detail::shifted(detail::max_affine_generators({{1.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0}, x), grad);
    };
    for (Vector x : {Vector{0.0, 0.0}, Vector{0.0, 2.0}})
        e.known_points.push_back({x, e.clarke_generators(x)});
    return e;
}

inline const std::vector<Vector>& example43_f_pieces() {
    static const std::vector<Vector> g{{1.0, 1.0, -1.0}, {-1.0, 1.0, 1.0}, {1.0, -1.0, 1.0}};
    return g;
}

inline const std::vector<Vector>& example43_phi_pieces() {
    static const std::vector<Vector> g{{1.0, -1.0, -1.0}, {-1.0, 1.0, -1.0}, {-1.0, -1.0, 1.0}};
    return g;
}

/// max{x1 + x2 - x3, x2 + x3 - x1, x3 + x1 - x2}.
inline CatalogEntry example43_f() {
    CatalogEntry e;
    e.name = "example43_f";
    e.dim = 3;
    e.expr = parse_expr(
        "(max (sub (add (var 0) (var 1)) (var 2)) (sub (add (var 1) (var 2)) (var 0)) "
        "(sub (add (var 2) (var 0)) (var 1)))");
    e.convex = true;
    e.curvature_bound = 0.0;
    e.clarke_generators = [](std::span<const double> x) {
        return detail::max_affine_generators(example43_f_pieces(), {0.0, 0.0, 0.0}, x);
    };
    e.known_points = {{{0.0, 0.0, 0.0}, GeneratorSet::hull(example43_f_pieces())}};
    return e;
}

/// max{x1 - x2 - x3, x2 - x3 - x1, x3 - x1 - x2}.
inline CatalogEntry example43_phi() {
    CatalogEntry e;
    e.name = "example43_phi";
    e.dim = 3;
    e.expr = parse_expr(
        "(max (sub (sub (var 0) (var 1)) (var 2)) (sub (sub (var 1) (var 2)) (var 0)) "
        "(sub (sub (var 2) (var 0)) (var 1)))");
    e.convex = true;
    e.curvature_bound = 0.0;
    e.clarke_generators = [](std::span<const double> x) {
        return detail::max_affine_generators(example43_phi_pieces(), {0.0, 0.0, 0.0}, x);
    };
    e.known_points = {{{0.0, 0.0, 0.0}, GeneratorSet::hull(example43_phi_pieces())}};
    return e;
}

inline CatalogEntry abs_1d() {
    CatalogEntry e;
    e.name = "abs_1d";
    e.dim = 1;
    e.expr = parse_expr("(abs (var 0))");
    e.convex = true;
    e.minimum = 0.0;
    e.curvature_bound = 0.0;
    e.clarke_generators = [](std::span<const double> x) {
        std::vector<Vector> g;
        for (double s : detail::sign_set(x[0])) g.push_back({s});
        return GeneratorSet::hull(std::move(g));
    };
    e.known_points = {{{0.0}, GeneratorSet::hull({{-1.0}, {1.0}})}, {{2.0}, GeneratorSet::hull({{1.0}})}};
    return e;
}

inline std::vector<CatalogEntry> catalog() {
    return {euclid_norm_2d(), neg_abs_x1(), max0_min(),     maxx1_0(),       abs_sum(),    quad_abs(),
            smooth_quadratic(), max_x1_quad(), example43_f(), example43_phi(), abs_1d()};
}

inline CatalogEntry catalog_entry(const std::string& name) {
    for (CatalogEntry& e : catalog())
        if (e.name == name) return e;
    throw ArgumentError("unknown catalog entry '" + name + "'");
}

}  // namespace compass
