#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls the directional-derivative machinery it is used to check.

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace oracles {

using Vec = std::vector<double>;

/// Central difference gradient, (f(x + h e_i) - f(x - h e_i)) / 2h.
inline Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        Vec a = x, b = x;
        a[i] += h;
        b[i] -= h;
        g[i] = (f(a) - f(b)) / (2 * h);
    }
    return g;
}

/// One-sided difference quotient (f(x + t d) - f(x)) / t.
inline double forward_quotient(const std::function<double(const Vec&)>& f, const Vec& x, const Vec& d, double t) {
    Vec y = x;
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += t * d[i];
    return (f(y) - f(x)) / t;
}

/// exp(tA) for a 2x2 matrix by a long Taylor series with scaling and squaring.
inline std::array<std::array<double, 2>, 2> expm2(std::array<std::array<double, 2>, 2> a, double t) {
    using M = std::array<std::array<double, 2>, 2>;
    auto mul = [](const M& x, const M& y) {
        M r{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) r[i][j] += x[i][k] * y[k][j];
        return r;
    };
    int squarings = 10;
    double s = t / std::pow(2.0, squarings);
    M x{{{a[0][0] * s, a[0][1] * s}, {a[1][0] * s, a[1][1] * s}}};
    M result{{{1, 0}, {0, 1}}}, term{{{1, 0}, {0, 1}}};
    for (int k = 1; k < 30; ++k) {
        term = mul(term, x);
        for (auto& row : term)
            for (double& v : row) v /= k;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) result[i][j] += term[i][j];
    }
    for (int k = 0; k < squarings; ++k) result = mul(result, result);
    return result;
}

/// Sensitivity right-hand side of the three-state |.| system written out case by case.
inline Vec example46_case_table(const Vec& x, const Vec& y) {
    double y1dot;
    if (x[0] < 0 && x[1] < 0) y1dot = -y[0] - y[1] + y[2];
    else if (x[0] < 0 && x[1] > 0) y1dot = -y[0] + y[1] + y[2];
    else if (x[0] < 0 && x[1] == 0) y1dot = -y[0] + std::abs(y[1]) + y[2];
    else if (x[0] > 0 && x[1] < 0) y1dot = y[0] - y[1] + y[2];
    else if (x[0] > 0 && x[1] > 0) y1dot = y[0] + y[1] + y[2];
    else if (x[0] > 0 && x[1] == 0) y1dot = y[0] + std::abs(y[1]) + y[2];
    else if (x[0] == 0 && x[1] < 0) y1dot = std::abs(y[0]) - y[1] + y[2];
    else if (x[0] == 0 && x[1] > 0) y1dot = std::abs(y[0]) + y[1] + y[2];
    else y1dot = std::abs(y[0]) + std::abs(y[1]) + y[2];
    double y2dot = x[1] > 0 ? y[1] : (x[1] == 0 ? std::abs(y[1]) : -y[1]);
    return {y1dot, y2dot, y[2]};
}

/// Closed-form psi(+/-e_i) for the three-state system at p = 0 and t_f = 1.
inline Vec example46_psi() { return {2 * M_E, -std::cosh(1.0), M_E, std::sinh(1.0)}; }

inline Vec example46_closed_form() { return {M_E + std::cosh(1.0) / 2, (M_E - std::sinh(1.0)) / 2}; }

inline Vec random_point(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(n);
    for (double& c : v) c = u(rng);
    return v;
}

}  // namespace oracles
