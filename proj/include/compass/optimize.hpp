#pragma once

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "compass/catalog.hpp"
#include "compass/compass.hpp"
#include "compass/error.hpp"
#include "compass/linalg.hpp"
#include "compass/oracle.hpp"

namespace compass {

struct ConstantStep {
    double gamma = 1.0;
};

/// gamma_k = gamma0 / sqrt(k + 1).
struct DiminishingStep {
    double gamma0 = 1.0;
};

/// gamma_k = (f(x_k) - f_star) / ||g_k||^2.
struct PolyakStep {
    double f_star = 0.0;
};

using StepRule = std::variant<ConstantStep, DiminishingStep, PolyakStep>;

inline std::string describe(const StepRule& rule) {
    char buf[64];
    if (const auto* c = std::get_if<ConstantStep>(&rule))
        std::snprintf(buf, sizeof buf, "constant(%g)", c->gamma);
    else if (const auto* d = std::get_if<DiminishingStep>(&rule))
        std::snprintf(buf, sizeof buf, "diminishing(%g)", d->gamma0);
    else
        std::snprintf(buf, sizeof buf, "polyak(%g)", std::get<PolyakStep>(rule).f_star);
    return buf;
}

inline void validate(const StepRule& rule) {
    if (const auto* c = std::get_if<ConstantStep>(&rule); c && !(c->gamma > 0.0))
        throw ArgumentError("constant step must be positive");
    if (const auto* d = std::get_if<DiminishingStep>(&rule); d && !(d->gamma0 > 0.0))
        throw ArgumentError("diminishing step must be positive");
    if (const auto* p = std::get_if<PolyakStep>(&rule); p && !std::isfinite(p->f_star))
        throw ArgumentError("Polyak target value must be finite");
}

struct Iterate {
    Vector x;
    double f = 0.0;
    Vector g;
    double step = 0.0;  // gamma_k taken from this iterate; 0 for the final one
};

enum class StopReason { MaxIterations, SmallSubgradient, TargetReached };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::SmallSubgradient: return "small_compass_difference";
        case StopReason::TargetReached: return "target_reached";
    }
    return "?";
}

struct OptTrace {
    std::vector<Iterate> iterates;
    double best_value = std::numeric_limits<double>::infinity();
    Vector best_point;
    StopReason stop = StopReason::MaxIterations;
    std::string note;
};

/// Subgradient method x_{k+1} = x_k - gamma_k g_k with g_k the compass
/// difference at x_k. Not a descent method, so the best iterate is tracked.
/// A small compass difference does not certify stationarity for nonconvex f.
inline OptTrace subgradient_method(const DirectionalOracle& oracle, std::span<const double> x0, const StepRule& rule,
                                   std::size_t max_iters, double stop_tol) {
    if (oracle.dim() != 2) throw ArgumentError("subgradient method requires a bivariate oracle");
    require_dim(x0, 2, "start point");
    if (max_iters < 1) throw ArgumentError("max_iters must be at least 1");
    if (!(stop_tol >= 0.0)) throw ArgumentError("stop_tol must be nonnegative");
    validate(rule);

    const auto* polyak = std::get_if<PolyakStep>(&rule);
    OptTrace trace;
    Vector x(x0.begin(), x0.end());
    for (std::size_t k = 0;; ++k) {
        Iterate it;
        it.x = x;
        it.f = oracle.value(x);
        it.g = compass_difference(oracle, x).subgradient;
        if (it.f < trace.best_value) {
            trace.best_value = it.f;
            trace.best_point = x;
        }
        const double gnorm = norm(it.g);
        bool stop = false;
        if (polyak && it.f - polyak->f_star <= stop_tol) {
            trace.stop = StopReason::TargetReached;
            stop = true;
        } else if (polyak && gnorm == 0.0) {
            throw NumericalError("zero compass difference at non-optimal point " + to_string(x));
        } else if (gnorm <= stop_tol) {
            trace.stop = StopReason::SmallSubgradient;
            trace.note = "compass difference vanished; not a stationarity certificate for nonconvex functions";
            stop = true;
        } else if (k == max_iters) {
            trace.stop = StopReason::MaxIterations;
            stop = true;
        }
        if (stop) {
            trace.iterates.push_back(std::move(it));
            break;
        }
        double gamma;
        if (const auto* c = std::get_if<ConstantStep>(&rule))
            gamma = c->gamma;
        else if (const auto* d = std::get_if<DiminishingStep>(&rule))
            gamma = d->gamma0 / std::sqrt(static_cast<double>(k + 1));
        else
            gamma = (it.f - polyak->f_star) / dot(it.g, it.g);
        it.step = gamma;
        x = axpy(-gamma, it.g, x);
        trace.iterates.push_back(std::move(it));
    }
    return trace;
}

struct BenchmarkRow {
    std::string function;
    std::string rule;
    double best_value = 0.0;
    std::size_t iterations = 0;
};

struct BenchmarkProblem {
    CatalogEntry entry;
    Vector start;
};

/// Convex catalog functions with known minimum 0, each with a fixed start.
inline std::vector<BenchmarkProblem> benchmark_problems() {
    return {{euclid_norm_2d(), {3.0, 4.0}}, {abs_sum(), {1.0, -2.0}}, {max_x1_quad(), {2.0, 3.0}}};
}

inline std::vector<BenchmarkRow> benchmark_suite(const std::vector<StepRule>& rules, std::size_t budget,
                                                 double stop_tol = 0.0) {
    if (budget < 1) throw ArgumentError("budget must be at least 1");
    std::vector<BenchmarkRow> rows;
    for (const BenchmarkProblem& bp : benchmark_problems()) {
        for (const StepRule& rule : rules) {
            OptTrace t = subgradient_method(bp.entry.oracle(), bp.start, rule, budget, stop_tol);
            rows.push_back({bp.entry.name, describe(rule), t.best_value, t.iterates.size() - 1});
        }
    }
    return rows;
}

}  // namespace compass
