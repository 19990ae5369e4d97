#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace resetlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a documented range or invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration text.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::string key = {});

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

/// The state left the domain where the vector field is defined.
///
/// Carries the offending coordinate and value. The integrator adds the time
/// and state at failure, and map iteration adds the iteration index, by
/// producing annotated copies.
class DomainError : public Error {
public:
    DomainError(std::string reason, std::size_t coordinate, double value);

    std::size_t coordinate() const noexcept { return coordinate_; }
    double value() const noexcept { return value_; }
    const std::string& reason() const noexcept { return reason_; }
    std::optional<double> time() const noexcept { return time_; }
    const std::vector<double>& state() const noexcept { return state_; }
    std::optional<std::size_t> iteration() const noexcept { return iteration_; }

    DomainError at_time(double t, std::vector<double> state) const;
    DomainError at_iteration(std::size_t iteration) const;

private:
    DomainError(std::string reason, std::size_t coordinate, double value, std::optional<double> time,
                std::vector<double> state, std::optional<std::size_t> iteration);

    static std::string compose(const std::string& reason, std::size_t coordinate, double value,
                               std::optional<double> time, std::optional<std::size_t> iteration);

    std::string reason_;
    std::size_t coordinate_;
    double value_;
    std::optional<double> time_;
    std::vector<double> state_;
    std::optional<std::size_t> iteration_;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(const std::string& what, std::size_t expected, std::size_t actual);
};

/// Adaptive step size collapsed below what the time axis can resolve.
class StepUnderflow : public Error {
public:
    StepUnderflow(double time, double step);

    double time() const noexcept { return time_; }
    double step() const noexcept { return step_; }

private:
    double time_;
    double step_;
};

/// Replenishment produced a negative increment or coordinate in strict mode.
class NegativePopulation : public Error {
public:
    using Error::Error;
};

class Unsupported : public Error {
public:
    using Error::Error;
};

/// Fixed-point search exhausted its iteration budget.
class NoConvergence : public Error {
public:
    NoConvergence(std::size_t max_iter, std::vector<double> best, double best_residual);

    const std::vector<double>& best() const noexcept { return best_; }
    double best_residual() const noexcept { return best_residual_; }
    std::size_t max_iter() const noexcept { return max_iter_; }

private:
    std::size_t max_iter_;
    std::vector<double> best_;
    double best_residual_;
};

class SingularJacobian : public Error {
public:
    using Error::Error;
};

/// A basin scan target that is not a fixed point of the map.
class InvalidTarget : public Error {
public:
    using Error::Error;
};

}  // namespace resetlab
