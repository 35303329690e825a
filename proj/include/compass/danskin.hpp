#pragma once

// Generalized gradients of optimal-value functions
//   phi(x) = min { f(x, y) : y in C },  x in R^2,
// for compact C and continuously differentiable f. With Y the minimizer set at
// x^, phi'(x^; d) = min { <d, grad_x f(x^, y)> : y in Y } and the compass
// difference of that directional derivative belongs to the generalized
// gradient of phi at x^.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "compass/compass.hpp"
#include "compass/error.hpp"
#include "compass/expr.hpp"
#include "compass/linalg.hpp"

namespace compass {

struct PointCloud {
    std::vector<Vector> points;
};

/// Axis-aligned box searched on a `grid`^m tensor grid, each near-optimal grid
/// point then polished by `refine_steps` rounds of compass-search coordinate descent.
struct Box {
    Vector lower;
    Vector upper;
    std::size_t grid = 21;
    std::size_t refine_steps = 60;
};

using FeasibleSet = std::variant<PointCloud, Box>;

struct OptimalValueProblem {
    using Objective = std::function<double(std::span<const double>, std::span<const double>)>;
    using Gradient = std::function<Vector(std::span<const double>, std::span<const double>)>;

    std::size_t m = 0;
    Objective objective;
    Gradient gradient_x;  // gradient of the objective in x, length 2
    FeasibleSet feasible;

    void validate() const {
        if (m == 0) throw ArgumentError("inner dimension must be positive");
        if (!objective || !gradient_x) throw ArgumentError("objective and gradient are required");
        if (const auto* cloud = std::get_if<PointCloud>(&feasible)) {
            if (cloud->points.empty()) throw ArgumentError("feasible point cloud is empty");
            for (const Vector& y : cloud->points) require_dim(y, m, "feasible point");
        } else {
            const Box& box = std::get<Box>(feasible);
            require_dim(box.lower, m, "box lower bound");
            require_dim(box.upper, m, "box upper bound");
            for (std::size_t i = 0; i < m; ++i)
                if (!(box.lower[i] <= box.upper[i]) || !std::isfinite(box.lower[i]) || !std::isfinite(box.upper[i]))
                    throw ArgumentError("box bounds must be finite with lower <= upper");
            if (box.grid < 2) throw ArgumentError("box grid resolution must be at least 2");
        }
    }
};

/// Objective and x-gradient given as expressions over (x_1, x_2, y_1, ..., y_m).
inline OptimalValueProblem make_optimal_value_problem(const Expr& objective, const std::vector<Expr>& gradient,
                                                      std::size_t m, FeasibleSet feasible) {
    if (gradient.size() != 2) throw ArgumentError("gradient needs exactly two components");
    for (const Expr& e : gradient)
        if (e.arity() > 2 + m) throw ArgumentError("gradient expression uses too many variables");
    if (objective.arity() > 2 + m) throw ArgumentError("objective expression uses too many variables");
    OptimalValueProblem p;
    p.m = m;
    p.objective = [objective](std::span<const double> x, std::span<const double> y) {
        return eval_value(objective, concat(x, y));
    };
    p.gradient_x = [gradient](std::span<const double> x, std::span<const double> y) {
        Vector xy = concat(x, y);
        return Vector{eval_value(gradient[0], xy), eval_value(gradient[1], xy)};
    };
    p.feasible = std::move(feasible);
    p.validate();
    return p;
}

/// `count` equally spaced points on the unit circle, starting at angle 0.
inline PointCloud circle_cloud(std::size_t count = 360) {
    PointCloud c;
    for (std::size_t k = 0; k < count; ++k) {
        double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
        c.points.push_back({std::cos(a), std::sin(a)});
    }
    return c;
}

struct ActiveSet {
    std::vector<Vector> minimizers;
    double optimal_value = 0.0;
    double epsilon = 0.0;
};

inline double default_eps_active(double optimal_value) { return 1e-8 * (1.0 + std::abs(optimal_value)); }

namespace detail {

inline double checked_objective(const OptimalValueProblem& p, std::span<const double> x, std::span<const double> y) {
    double v = p.objective(x, y);
    if (!std::isfinite(v)) throw OracleError("non-finite objective value at feasible point " + to_string(y), Vector(y.begin(), y.end()));
    return v;
}

inline std::vector<Vector> box_grid(const Box& box) {
    const std::size_t m = box.lower.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) total *= box.grid;
    std::vector<Vector> pts;
    pts.reserve(total);
    std::vector<std::size_t> idx(m, 0);
    for (std::size_t k = 0; k < total; ++k) {
        Vector y(m);
        for (std::size_t i = 0; i < m; ++i)
            y[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * static_cast<double>(idx[i]) /
                                      static_cast<double>(box.grid - 1);
        pts.push_back(std::move(y));
        for (std::size_t i = m; i-- > 0;) {
            if (++idx[i] < box.grid) break;
            idx[i] = 0;
        }
    }
    return pts;
}

/// Compass search restricted to the box; step halves when no axis move improves.
inline std::pair<Vector, double> refine(const OptimalValueProblem& p, const Box& box, std::span<const double> x,
                                        Vector y, double fy) {
    const std::size_t m = y.size();
    Vector h(m);
    for (std::size_t i = 0; i < m; ++i) h[i] = (box.upper[i] - box.lower[i]) / static_cast<double>(box.grid - 1);
    for (std::size_t step = 0; step < box.refine_steps; ++step) {
        bool improved = false;
        for (std::size_t i = 0; i < m; ++i) {
            for (double sign : {1.0, -1.0}) {
                Vector trial = y;
                trial[i] = std::clamp(y[i] + sign * h[i], box.lower[i], box.upper[i]);
                double ft = checked_objective(p, x, trial);
                if (ft < fy) {
                    y = std::move(trial);
                    fy = ft;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved)
            for (double& hi : h) hi *= 0.5;
    }
    return {std::move(y), fy};
}

}  // namespace detail

/// Minimizers of f(x^, .) over the feasible set, within eps_active of the
/// optimum. Without an explicit eps the default 1e-8 (1 + |optimum|) is used.
inline ActiveSet solve_inner(const OptimalValueProblem& p, std::span<const double> x_hat,
                             std::optional<double> eps_active = std::nullopt) {
    p.validate();
    require_dim(x_hat, 2, "point");
    if (eps_active && !(*eps_active > 0.0)) throw ArgumentError("eps_active must be positive");

    std::vector<Vector> candidates;
    std::vector<double> values;
    if (const auto* cloud = std::get_if<PointCloud>(&p.feasible)) {
        candidates = cloud->points;
        for (const Vector& y : candidates) values.push_back(detail::checked_objective(p, x_hat, y));
    } else {
        const Box& box = std::get<Box>(p.feasible);
        std::vector<Vector> grid = detail::box_grid(box);
        std::vector<double> gv;
        gv.reserve(grid.size());
        for (const Vector& y : grid) gv.push_back(detail::checked_objective(p, x_hat, y));
        double gmin = *std::min_element(gv.begin(), gv.end());
        double eps = eps_active.value_or(default_eps_active(gmin));
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (gv[k] > gmin + eps) continue;
            auto [y, fy] = detail::refine(p, box, x_hat, grid[k], gv[k]);
            bool duplicate = false;
            for (const Vector& c : candidates)
                if (distance(c, y) <= 1e-6) duplicate = true;
            if (duplicate) continue;
            candidates.push_back(std::move(y));
            values.push_back(fy);
        }
    }

    ActiveSet a;
    a.optimal_value = *std::min_element(values.begin(), values.end());
    a.epsilon = eps_active.value_or(default_eps_active(a.optimal_value));
    for (std::size_t k = 0; k < candidates.size(); ++k)
        if (values[k] <= a.optimal_value + a.epsilon) a.minimizers.push_back(candidates[k]);
    return a;
}

inline double optimal_value(const OptimalValueProblem& p, std::span<const double> x) {
    return solve_inner(p, x).optimal_value;
}

/// min { <d, grad_x f(x^, y)> : y in active set }.
inline double psi(const OptimalValueProblem& p, std::span<const double> x_hat, const ActiveSet& active,
                  std::span<const double> d) {
    if (active.minimizers.empty()) throw ArgumentError("active set is empty");
    require_dim(d, 2, "direction");
    double best = std::numeric_limits<double>::infinity();
    for (const Vector& y : active.minimizers) {
        Vector g = p.gradient_x(x_hat, y);
        require_dim(g, 2, "gradient");
        best = std::min(best, dot(d, g));
    }
    return best;
}

inline CompassResult danskin_compass(const OptimalValueProblem& p, std::span<const double> x_hat,
                                     const ActiveSet& active) {
    CompassResult r;
    for (std::size_t i = 0; i < 2; ++i)
        for (double sign : {1.0, -1.0}) {
            Vector d = unit_vector(2, i, sign);
            double v = psi(p, x_hat, active, d);
            r.probes.push_back({std::move(d), v});
        }
    r.basis = identity_rows(2);
    r.subgradient = assemble_subgradient(r.probes, r.basis);
    r.guarantee = Guarantee::Guaranteed;
    return r;
}

inline CompassResult danskin_subgradient(const OptimalValueProblem& p, std::span<const double> x_hat,
                                         std::optional<double> eps_active = std::nullopt) {
    return danskin_compass(p, x_hat, solve_inner(p, x_hat, eps_active));
}

/// Result under eps and 10 eps, so sensitivity to the activation tolerance is visible.
struct DanskinReport {
    CompassResult result;
    ActiveSet active;
    CompassResult result_wide;
    ActiveSet active_wide;
    bool stable = false;  // both tolerances give the same subgradient
};

inline DanskinReport danskin_report(const OptimalValueProblem& p, std::span<const double> x_hat,
                                    std::optional<double> eps_active = std::nullopt) {
    DanskinReport r;
    r.active = solve_inner(p, x_hat, eps_active);
    r.result = danskin_compass(p, x_hat, r.active);
    r.active_wide = solve_inner(p, x_hat, 10.0 * r.active.epsilon);
    r.result_wide = danskin_compass(p, x_hat, r.active_wide);
    r.stable = r.result.subgradient == r.result_wide.subgradient;
    return r;
}

}  // namespace compass
