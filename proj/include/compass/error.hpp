#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace compass {

/// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: wrong dimensions, invalid configuration, malformed files.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Expression text could not be parsed. `position()` is a byte offset.
class ParseError : public ArgumentError {
public:
    ParseError(const std::string& what, std::size_t position)
        : ArgumentError(what + " at position " + std::to_string(position)), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Thrown by an oracle when f'(x; d) does not exist at the queried point.
class UndefinedDerivative : public Error {
public:
    using Error::Error;
};

/// An oracle probe failed; carries the direction that was being probed.
class OracleError : public Error {
public:
    OracleError(const std::string& what, std::vector<double> direction)
        : Error(what), direction_(std::move(direction)) {}

    const std::vector<double>& direction() const noexcept { return direction_; }

private:
    std::vector<double> direction_;
};

/// Numerical breakdown that is not attributable to bad input.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// ODE integration failed at `time()`. `direction()` is empty for plain
/// state integrations and holds the probed parameter direction otherwise.
class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, double time, std::vector<double> direction = {})
        : NumericalError(what), time_(time), direction_(std::move(direction)) {}

    double time() const noexcept { return time_; }
    const std::vector<double>& direction() const noexcept { return direction_; }

private:
    double time_;
    std::vector<double> direction_;
};

}  // namespace compass
