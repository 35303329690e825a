#pragma once

// Subgradients of costs of two-parameter nonsmooth ODEs. The state
// x' = f(x), x(0) = x0(p) is integrated together with the directional
// sensitivity y' = f'(x; y), y(0) = x0'(p; d); then
// psi(d) = g'((p, x(tf)); (d, y(tf))) and the compass difference of psi over
// +/-e_1, +/-e_2 is a generalized gradient element of p -> g(p, x(tf, p)).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <future>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "compass/compass.hpp"
#include "compass/error.hpp"
#include "compass/expr.hpp"
#include "compass/linalg.hpp"
#include "compass/oracle.hpp"

namespace compass {

struct OdeProblem {
    std::size_t n_state = 0;
    VectorOracle rhs;    // R^n -> R^n
    VectorOracle init;   // R^2 -> R^n
    DirectionalOracle cost;  // over (p, x) in R^(2+n)
    double t_final = 1.0;

    void validate() const {
        if (n_state == 0) throw ArgumentError("n_state must be positive");
        if (rhs.in_dim() != n_state || rhs.out_dim() != n_state)
            throw ArgumentError("rhs must map R^n_state to R^n_state");
        if (init.in_dim() != 2 || init.out_dim() != n_state)
            throw ArgumentError("initial condition must map R^2 to R^n_state");
        if (cost.dim() != 2 + n_state) throw ArgumentError("cost must be defined on R^(2 + n_state)");
        if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ArgumentError("t_final must be positive");
    }
};

/// Problem assembled from expressions. Cost variables are (p_1, p_2, x_1, ..., x_n).
inline OdeProblem make_ode_problem(const std::vector<Expr>& rhs, const std::vector<Expr>& init, const Expr& cost,
                                   double t_final) {
    const std::size_t n = rhs.size();
    if (n == 0) throw ArgumentError("rhs needs at least one component");
    if (init.size() != n) throw ArgumentError("init must have one expression per state");
    OdeProblem p{n, make_vector_oracle(rhs, n), make_vector_oracle(init, 2), make_oracle(cost, 2 + n), t_final};
    p.validate();
    return p;
}

struct IntegrationConfig {
    double abs_tol = 1e-8;
    double rel_tol = 1e-8;
    std::size_t max_steps = 200000;
    double min_step = 1e-14;
    double initial_step = 0.0;  // 0 selects a step automatically

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ArgumentError("tolerances must be positive");
        if (max_steps < 1) throw ArgumentError("max_steps must be at least 1");
        if (!(min_step > 0.0)) throw ArgumentError("min_step must be positive");
        if (initial_step < 0.0) throw ArgumentError("initial_step must be nonnegative");
    }
};

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

struct Solution {
    std::vector<double> times;
    std::vector<Vector> values;
    StepStats stats;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

inline double error_norm(const Vector& err, const Vector& y0, const Vector& y1, const IntegrationConfig& cfg) {
    double s = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        double sk = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        s += (err[i] / sk) * (err[i] / sk);
    }
    return std::sqrt(s / static_cast<double>(err.size()));
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(y) on [0, t_final]
/// with a PI step-size controller. Records every accepted step.
template <class Rhs>
Solution integrate_autonomous(Rhs&& rhs, Vector y, double t_final, const IntegrationConfig& cfg) {
    using namespace detail;
    cfg.validate();
    const std::size_t n = y.size();
    Solution sol;
    sol.times.push_back(0.0);
    sol.values.push_back(y);

    double t = 0.0;
    auto eval = [&](const Vector& z) {
        ++sol.stats.rhs_evals;
        Vector k = rhs(z);
        if (!all_finite(k)) throw IntegrationError("right-hand side returned a non-finite value", t);
        return k;
    };
    auto stage = [&](const Vector& base, double h, std::initializer_list<std::pair<double, const Vector*>> terms) {
        Vector out = base;
        for (auto [coef, k] : terms)
            for (std::size_t i = 0; i < n; ++i) out[i] += h * coef * (*k)[i];
        return out;
    };

    Vector k1 = eval(y);
    double h = cfg.initial_step;
    if (h == 0.0) {
        // Hairer-Wanner starting step heuristic.
        Vector sk(n);
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sk[i] = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
            d0 += (y[i] / sk[i]) * (y[i] / sk[i]);
            d1 += (k1[i] / sk[i]) * (k1[i] / sk[i]);
        }
        d0 = std::sqrt(d0 / n);
        d1 = std::sqrt(d1 / n);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, t_final);
        Vector y1 = stage(y, h0, {{1.0, &k1}});
        Vector k2 = eval(y1);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) d2 += ((k2[i] - k1[i]) / sk[i]) * ((k2[i] - k1[i]) / sk[i]);
        d2 = std::sqrt(d2 / n) / h0;
        double m = std::max(d1, d2);
        double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
        h = std::min(100.0 * h0, h1);
    }
    h = std::min(h, t_final);

    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
    const double expo = 0.2 - 0.75 * beta;
    double err_old = 1e-4;
    bool last_rejected = false;
    std::size_t steps = 0;

    while (t < t_final) {
        if (steps++ >= cfg.max_steps) throw IntegrationError("maximum step count exceeded", t);
        if (h < cfg.min_step) throw IntegrationError("step size underflow", t);
        bool last = t + h >= t_final;
        double hs = last ? t_final - t : h;

        Vector k2 = eval(stage(y, hs, {{a21, &k1}}));
        Vector k3 = eval(stage(y, hs, {{a31, &k1}, {a32, &k2}}));
        Vector k4 = eval(stage(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        Vector k5 = eval(stage(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        Vector k6 = eval(stage(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        Vector y_new = stage(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        Vector k7 = eval(y_new);
        Vector err(n);
        for (std::size_t i = 0; i < n; ++i)
            err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        double en = error_norm(err, y, y_new, cfg);
        if (!std::isfinite(en)) throw IntegrationError("non-finite error estimate", t);

        double fac11 = std::pow(en, expo);
        if (en <= 1.0) {
            double fac = fac11 / std::pow(err_old, beta);
            fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
            double h_new = hs / fac;
            if (last_rejected) h_new = std::min(h_new, hs);
            err_old = std::max(en, 1e-4);
            t = last ? t_final : t + hs;
            y = std::move(y_new);
            k1 = std::move(k7);
            ++sol.stats.accepted;
            sol.times.push_back(t);
            sol.values.push_back(y);
            h = h_new;
            last_rejected = false;
        } else {
            h = hs / std::min(1.0 / fac_min, fac11 / safety);
            ++sol.stats.rejected;
            last_rejected = true;
        }
    }
    return sol;
}

struct SensitivityTrajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> sensitivities;
    Vector direction;
    StepStats stats;
};

/// Integrates x' = f(x) jointly with y' = f'(x; y) from (x0(p), x0'(p; d)).
inline SensitivityTrajectory integrate_coupled(const OdeProblem& problem, std::span<const double> p,
                                               std::span<const double> d, const IntegrationConfig& cfg) {
    problem.validate();
    require_dim(p, 2, "parameter");
    require_dim(d, 2, "direction");
    const std::size_t n = problem.n_state;
    Vector z = concat(problem.init.value(p), problem.init.dir_deriv(p, d));
    auto rhs = [&](const Vector& s) {
        std::span<const double> x(s.data(), n), y(s.data() + n, n);
        return concat(problem.rhs.value(x), problem.rhs.dir_deriv(x, y));
    };
    SensitivityTrajectory tr;
    tr.direction.assign(d.begin(), d.end());
    Solution sol;
    try {
        sol = integrate_autonomous(rhs, std::move(z), problem.t_final, cfg);
    } catch (const IntegrationError& e) {
        throw IntegrationError(e.what(), e.time(), tr.direction);
    }
    tr.times = std::move(sol.times);
    tr.stats = sol.stats;
    for (const Vector& s : sol.values) {
        tr.states.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
        tr.sensitivities.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
    }
    return tr;
}

/// State trajectory only, x' = f(x), x(0) = x0(p).
inline Solution integrate_state(const OdeProblem& problem, std::span<const double> p, const IntegrationConfig& cfg) {
    problem.validate();
    require_dim(p, 2, "parameter");
    auto rhs = [&](const Vector& x) { return problem.rhs.value(x); };
    return integrate_autonomous(rhs, problem.init.value(p), problem.t_final, cfg);
}

/// phi(p) = g(p, x(t_f, p)).
inline double ode_cost(const OdeProblem& problem, std::span<const double> p, const IntegrationConfig& cfg) {
    Solution s = integrate_state(problem, p, cfg);
    return problem.cost.value(concat(p, s.values.back()));
}

/// psi(d) = g'((p, x(t_f)); (d, y(t_f, d))) from one coupled integration.
inline double ode_cost_dirderiv(const OdeProblem& problem, std::span<const double> p, std::span<const double> d,
                                const IntegrationConfig& cfg, SensitivityTrajectory* trajectory = nullptr) {
    SensitivityTrajectory tr = integrate_coupled(problem, p, d, cfg);
    double v = problem.cost.dir_deriv(concat(p, tr.states.back()), concat(d, tr.sensitivities.back()));
    if (trajectory) *trajectory = std::move(tr);
    return v;
}

struct OdeSubgradient {
    CompassResult result;
    std::array<SensitivityTrajectory, 4> trajectories;  // +e1, -e1, +e2, -e2
};

/// The four directional integrations run concurrently; results are combined in
/// the fixed order (+e1, -e1, +e2, -e2).
inline OdeSubgradient ode_subgradient_with_trajectories(const OdeProblem& problem, std::span<const double> p,
                                                        const IntegrationConfig& cfg) {
    problem.validate();
    cfg.validate();
    require_dim(p, 2, "parameter");
    const Vector pv(p.begin(), p.end());
    const std::array<Vector, 4> dirs{Vector{1.0, 0.0}, Vector{-1.0, 0.0}, Vector{0.0, 1.0}, Vector{0.0, -1.0}};
    std::array<std::future<std::pair<double, SensitivityTrajectory>>, 4> jobs;
    for (std::size_t k = 0; k < 4; ++k) {
        jobs[k] = std::async(std::launch::async, [&problem, &pv, &cfg, d = dirs[k]] {
            SensitivityTrajectory tr;
            double v = ode_cost_dirderiv(problem, pv, d, cfg, &tr);
            return std::make_pair(v, std::move(tr));
        });
    }
    OdeSubgradient out;
    for (std::size_t k = 0; k < 4; ++k) {
        auto [v, tr] = jobs[k].get();
        out.result.probes.push_back({dirs[k], v});
        out.trajectories[k] = std::move(tr);
    }
    out.result.basis = identity_rows(2);
    out.result.subgradient = assemble_subgradient(out.result.probes, out.result.basis);
    out.result.guarantee = Guarantee::Guaranteed;
    return out;
}

inline CompassResult ode_subgradient(const OdeProblem& problem, std::span<const double> p,
                                     const IntegrationConfig& cfg) {
    return ode_subgradient_with_trajectories(problem, p, cfg).result;
}

/// The three-state example with x0(p) = (p1, p2, p1), cost x_1(1):
///   x1' = |x1| + |x2| + x3,  x2' = |x2|,  x3' = x3.
inline OdeProblem example46_problem() {
    return make_ode_problem({parse_expr("(add (abs (var 0)) (abs (var 1)) (var 2))"), parse_expr("(abs (var 1))"),
                             parse_expr("(var 2)")},
                            {parse_expr("(var 0)"), parse_expr("(var 1)"), parse_expr("(var 0)")},
                            parse_expr("(var 2)"), 1.0);
}

}  // namespace compass
