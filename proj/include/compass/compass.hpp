#pragma once

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
#include "compass/linalg.hpp"
#include "compass/oracle.hpp"
#include "compass/sampling.hpp"

namespace compass {

/// Whether the paired theory guarantees Clarke membership of a compass result.
/// Guaranteed for n <= 2; for n >= 3 a compass difference can miss the
/// generalized gradient entirely.
enum class Guarantee { Guaranteed, Unguaranteed };

inline const char* to_string(Guarantee g) {
    return g == Guarantee::Guaranteed ? "Guaranteed" : "Unguaranteed";
}

inline Guarantee guarantee_for_dim(std::size_t n) {
    return n <= 2 ? Guarantee::Guaranteed : Guarantee::Unguaranteed;
}

struct Probe {
    Vector direction;
    double value = 0.0;
};

/// A compass difference together with the 2n probes that produced it.
/// Probes are stored as (+b_1, -b_1, +b_2, -b_2, ...) for basis columns b_i.
struct CompassResult {
    Vector subgradient;
    std::vector<Probe> probes;
    std::vector<Vector> basis;  // rows of the basis matrix; identity for the plain construction
    Guarantee guarantee = Guarantee::Guaranteed;
};

inline std::vector<Vector> identity_rows(std::size_t n) {
    std::vector<Vector> rows(n, Vector(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1.0;
    return rows;
}

/// Half-differences z_i = (p_{2i} - p_{2i+1}) / 2 of an ordered probe list.
inline Vector half_differences(std::span<const Probe> probes) {
    Vector z(probes.size() / 2);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = 0.5 * (probes[2 * i].value - probes[2 * i + 1].value);
    return z;
}

/// Rebuilds the subgradient from recorded probes and basis. For the identity
/// basis this is just the half-differences; otherwise (V^T)^{-1} z in 2-D.
inline Vector assemble_subgradient(std::span<const Probe> probes, const std::vector<Vector>& basis) {
    Vector z = half_differences(probes);
    if (basis == identity_rows(z.size())) return z;
    if (z.size() != 2) throw ArgumentError("non-identity basis requires dimension 2");
    Matrix2 v{{{basis[0][0], basis[0][1]}, {basis[1][0], basis[1][1]}}};
    return solve_transposed(v, z);
}

namespace detail {

inline double probe(const DirectionalOracle& oracle, std::span<const double> x, const Vector& d) {
    double value;
    try {
        value = oracle.dir_deriv(x, d);
    } catch (const ArgumentError&) {
        throw;
    } catch (const std::exception& e) {
        throw OracleError(std::string("oracle evaluation failed in direction ") + to_string(d) + ": " + e.what(),
                          d);
    }
    if (!std::isfinite(value))
        throw OracleError("oracle returned non-finite value in direction " + to_string(d), d);
    return value;
}

}  // namespace detail

/// Compass difference: component i is (f'(x; e_i) - f'(x; -e_i)) / 2.
inline CompassResult compass_difference(const DirectionalOracle& oracle, std::span<const double> x) {
    const std::size_t n = oracle.dim();
    require_dim(x, n, "point");
    CompassResult r;
    r.probes.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double sign : {1.0, -1.0}) {
            Vector d = unit_vector(n, i, sign);
            double v = detail::probe(oracle, x, d);
            r.probes.push_back({std::move(d), v});
        }
    }
    r.basis = identity_rows(n);
    r.subgradient = assemble_subgradient(r.probes, r.basis);
    r.guarantee = guarantee_for_dim(n);
    return r;
}

inline constexpr double kDefaultSingularThreshold = 1e-12;

/// Compass difference along the columns v_1, v_2 of a nonsingular V, mapped
/// back through (V^T)^{-1}. A Clarke subgradient, though not necessarily the
/// one returned by compass_difference.
inline CompassResult basis_compass_difference(const DirectionalOracle& oracle, std::span<const double> x,
                                              const Matrix2& basis,
                                              double singular_threshold = kDefaultSingularThreshold) {
    if (oracle.dim() != 2) throw ArgumentError("basis compass difference requires dimension 2");
    require_dim(x, 2, "point");
    if (!(std::abs(determinant(basis)) >= singular_threshold)) throw ArgumentError("basis not invertible");
    CompassResult r;
    for (std::size_t j = 0; j < 2; ++j) {
        Vector col = column(basis, j);
        for (double sign : {1.0, -1.0}) {
            Vector d = scaled(sign, col);
            for (double& c : d) c += 0.0;  // -0.0 -> +0.0
            double v = detail::probe(oracle, x, d);
            r.probes.push_back({std::move(d), v});
        }
    }
    r.basis = {{basis[0][0], basis[0][1]}, {basis[1][0], basis[1][1]}};
    r.subgradient = assemble_subgradient(r.probes, r.basis);
    r.guarantee = Guarantee::Guaranteed;
    return r;
}

using ValueFunction = std::function<double(std::span<const double>)>;

/// Centered finite-difference approximation of the compass difference,
/// (f(x + delta e_i) - f(x - delta e_i)) / (2 delta).
inline Vector finite_difference_compass(const ValueFunction& f, std::span<const double> x, double delta) {
    if (!(delta > 0.0)) throw ArgumentError("finite-difference width must be positive");
    const std::size_t n = x.size();
    Vector g(n);
    auto eval = [&](const Vector& p) {
        double v = f(p);
        if (!std::isfinite(v)) throw OracleError("non-finite function value at " + to_string(p), p);
        return v;
    };
    for (std::size_t i = 0; i < n; ++i) {
        Vector xp(x.begin(), x.end()), xm(x.begin(), x.end());
        xp[i] += delta;
        xm[i] -= delta;
        g[i] = (eval(xp) - eval(xm)) / (2.0 * delta);
    }
    return g;
}

struct UnivariateClarkeInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// conv{f'(x; 1), -f'(x; -1)}, the whole generalized gradient of a
/// B-differentiable univariate function.
inline UnivariateClarkeInterval univariate_clarke_interval(const DirectionalOracle& oracle, double x) {
    if (oracle.dim() != 1) throw ArgumentError("univariate Clarke interval requires dimension 1");
    const Vector pt{x};
    double right = detail::probe(oracle, pt, {1.0});
    double left = -detail::probe(oracle, pt, {-1.0});
    return {std::min(right, left), std::max(right, left)};
}

/// Outcome of checking f(y) >= f(x) + <s, y - x> on a finite sample.
struct SubgradientCheck {
    std::vector<double> violations;  // f(x) + <s, y - x> - f(y), one per sample
    double max_violation = -std::numeric_limits<double>::infinity();
    Vector worst_sample;
    double slack = 0.0;
    bool pass = false;
    std::string note;
};

inline constexpr double kAnalyticSlack = 1e-9;
inline constexpr double kIntegratedSlack = 1e-4;

inline SubgradientCheck verify_subgradient_inequality(const ValueFunction& f, std::span<const double> x,
                                                      std::span<const double> s, std::span<const Vector> samples,
                                                      double slack = kAnalyticSlack) {
    if (samples.empty()) throw ArgumentError("sample list is empty");
    if (!(slack >= 0.0)) throw ArgumentError("slack must be nonnegative");
    require_dim(s, x.size(), "subgradient");
    SubgradientCheck rep;
    rep.slack = slack;
    const double fx = f(x);
    rep.violations.reserve(samples.size());
    for (const Vector& y : samples) {
        require_dim(y, x.size(), "sample");
        double lin = fx;
        for (std::size_t i = 0; i < y.size(); ++i) lin += s[i] * (y[i] - x[i]);
        double v = lin - f(y);
        rep.violations.push_back(v);
        if (v > rep.max_violation || rep.worst_sample.empty()) {
            rep.max_violation = v;
            rep.worst_sample = y;
        }
    }
    rep.pass = rep.max_violation <= slack;
    rep.note = rep.pass ? "passes on all samples; a certificate only if f is convex"
                        : "violated at worst sample";
    return rep;
}

/// Default verification sample: Halton points in [lower, upper], the 2n points
/// x +/- r e_i with r the box half-width, and 64 points on a circle of radius
/// 1e-3 around x (2-D only).
inline std::vector<Vector> verification_samples(std::span<const double> x, const Vector& lower, const Vector& upper,
                                                std::size_t halton_count, std::uint64_t skip = 0) {
    std::vector<Vector> out = halton_box(lower, upper, halton_count, skip);
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.5 * (upper[i] - lower[i]);
        for (double sign : {1.0, -1.0}) {
            Vector y(x.begin(), x.end());
            y[i] += sign * r;
            out.push_back(std::move(y));
        }
    }
    if (n == 2) {
        for (const Vector& d : sphere_directions(2, 64)) out.push_back(axpy(1e-3, d, x));
    }
    return out;
}

}  // namespace compass
