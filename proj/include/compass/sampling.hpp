#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "compass/linalg.hpp"

namespace compass {

/// Van der Corput radical inverse of `index` in `base`.
inline double radical_inverse(std::uint64_t index, unsigned base) {
    double inv_base = 1.0 / base;
    double f = inv_base;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv_base;
    }
    return r;
}

inline constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

/// Halton point number `index` (1-based is customary; 0 maps to the origin) in [0,1)^dim.
inline Vector halton_point(std::uint64_t index, std::size_t dim) {
    Vector p(dim);
    for (std::size_t j = 0; j < dim; ++j) p[j] = radical_inverse(index, kPrimes[j % std::size(kPrimes)]);
    return p;
}

/// `count` Halton points mapped into the box [lower, upper], starting at index `skip + 1`.
inline std::vector<Vector> halton_box(const Vector& lower, const Vector& upper, std::size_t count,
                                      std::uint64_t skip = 0) {
    std::vector<Vector> pts;
    pts.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Vector u = halton_point(skip + k + 1, lower.size());
        for (std::size_t j = 0; j < u.size(); ++j) u[j] = lower[j] + (upper[j] - lower[j]) * u[j];
        pts.push_back(std::move(u));
    }
    return pts;
}

/// Deterministic unit directions. In 1-D: {+1, -1}. In 2-D: `count` equally spaced
/// angles starting at 0 so the coordinate axes are hit when 4 divides `count`.
/// In 3-D: Halton points under the area-preserving cylinder map. Above that:
/// Halton points kept inside the unit ball, then projected radially.
inline std::vector<Vector> sphere_directions(std::size_t dim, std::size_t count) {
    std::vector<Vector> dirs;
    if (dim == 1) return {{1.0}, {-1.0}};
    dirs.reserve(count);
    if (dim == 2) {
        for (std::size_t k = 0; k < count; ++k) {
            double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
            dirs.push_back({std::cos(a), std::sin(a)});
        }
        return dirs;
    }
    if (dim == 3) {
        for (std::size_t k = 0; k < count; ++k) {
            double z = 2.0 * radical_inverse(k + 1, 2) - 1.0;
            double phi = 2.0 * std::numbers::pi * radical_inverse(k + 1, 3);
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
        }
        return dirs;
    }
    for (std::size_t k = 0; dirs.size() < count; ++k) {
        Vector u = halton_point(k + 1, dim);
        for (double& v : u) v = 2.0 * v - 1.0;
        double n = norm(u);
        if (n < 1e-3 || n > 1.0) continue;
        dirs.push_back(scaled(1.0 / n, u));
    }
    return dirs;
}

}  // namespace compass
