#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>

#include "compass/error.hpp"
#include "compass/linalg.hpp"

namespace compass {

/// A scalar function on R^n together with its one-sided directional derivative
/// f'(x; d). Both callables must be safe to invoke concurrently. An oracle that
/// cannot produce f'(x; d) throws UndefinedDerivative rather than guessing.
class DirectionalOracle {
public:
    using ValueFn = std::function<double(std::span<const double>)>;
    using DirDerivFn = std::function<double(std::span<const double>, std::span<const double>)>;

    DirectionalOracle(std::size_t dim, ValueFn value, DirDerivFn dir_deriv)
        : dim_(dim), value_(std::move(value)), dir_deriv_(std::move(dir_deriv)) {
        if (dim_ == 0) throw ArgumentError("oracle dimension must be positive");
    }

    std::size_t dim() const noexcept { return dim_; }

    double value(std::span<const double> x) const {
        require_dim(x, dim_, "point");
        return value_(x);
    }

    double dir_deriv(std::span<const double> x, std::span<const double> d) const {
        require_dim(x, dim_, "point");
        require_dim(d, dim_, "direction");
        return dir_deriv_(x, d);
    }

private:
    std::size_t dim_;
    ValueFn value_;
    DirDerivFn dir_deriv_;
};

/// Vector-valued counterpart of DirectionalOracle, R^n -> R^m.
class VectorOracle {
public:
    using ValueFn = std::function<Vector(std::span<const double>)>;
    using DirDerivFn = std::function<Vector(std::span<const double>, std::span<const double>)>;

    VectorOracle(std::size_t in_dim, std::size_t out_dim, ValueFn value, DirDerivFn dir_deriv)
        : in_dim_(in_dim), out_dim_(out_dim), value_(std::move(value)), dir_deriv_(std::move(dir_deriv)) {
        if (in_dim_ == 0 || out_dim_ == 0) throw ArgumentError("oracle dimensions must be positive");
    }

    std::size_t in_dim() const noexcept { return in_dim_; }
    std::size_t out_dim() const noexcept { return out_dim_; }

    Vector value(std::span<const double> x) const {
        require_dim(x, in_dim_, "point");
        return value_(x);
    }

    Vector dir_deriv(std::span<const double> x, std::span<const double> d) const {
        require_dim(x, in_dim_, "point");
        require_dim(d, in_dim_, "direction");
        return dir_deriv_(x, d);
    }

private:
    std::size_t in_dim_;
    std::size_t out_dim_;
    ValueFn value_;
    DirDerivFn dir_deriv_;
};

/// c * f for c > 0.
inline DirectionalOracle scaled_oracle(DirectionalOracle f, double c) {
    auto fv = f;
    auto fd = f;
    return DirectionalOracle(
        f.dim(), [fv, c](std::span<const double> x) { return c * fv.value(x); },
        [fd, c](std::span<const double> x, std::span<const double> d) { return c * fd.dir_deriv(x, d); });
}

/// y -> f(y) + <a, y>.
inline DirectionalOracle tilted_oracle(DirectionalOracle f, Vector a) {
    require_dim(a, f.dim(), "tilt");
    auto fv = f;
    auto fd = f;
    return DirectionalOracle(
        f.dim(), [fv, a](std::span<const double> x) { return fv.value(x) + dot(a, x); },
        [fd, a](std::span<const double> x, std::span<const double> d) { return fd.dir_deriv(x, d) + dot(a, d); });
}

}  // namespace compass
