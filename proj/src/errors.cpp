#include "resetlab/errors.hpp"

#include <sstream>
#include <utility>

namespace resetlab {

ParseError::ParseError(const std::string& message, std::size_t line, std::string key)
    : Error("line " + std::to_string(line) + (key.empty() ? "" : " (" + key + ")") + ": " + message),
      line_(line),
      key_(std::move(key)) {}

DomainError::DomainError(std::string reason, std::size_t coordinate, double value)
    : DomainError(std::move(reason), coordinate, value, std::nullopt, {}, std::nullopt) {}

DomainError::DomainError(std::string reason, std::size_t coordinate, double value,
                         std::optional<double> time, std::vector<double> state,
                         std::optional<std::size_t> iteration)
    : Error(compose(reason, coordinate, value, time, iteration)),
      reason_(std::move(reason)),
      coordinate_(coordinate),
      value_(value),
      time_(time),
      state_(std::move(state)),
      iteration_(iteration) {}

std::string DomainError::compose(const std::string& reason, std::size_t coordinate, double value,
                                 std::optional<double> time, std::optional<std::size_t> iteration) {
    std::ostringstream os;
    os.precision(17);
    os << "domain error: " << reason << " (coordinate " << coordinate << " = " << value << ")";
    if (time) os << " at t = " << *time;
    if (iteration) os << " in map iteration " << *iteration;
    return os.str();
}

DomainError DomainError::at_time(double t, std::vector<double> state) const {
    return DomainError(reason_, coordinate_, value_, t, std::move(state), iteration_);
}

DomainError DomainError::at_iteration(std::size_t iteration) const {
    return DomainError(reason_, coordinate_, value_, time_, state_, iteration);
}

DimensionMismatch::DimensionMismatch(const std::string& what, std::size_t expected, std::size_t actual)
    : Error("dimension mismatch: " + what + " expects " + std::to_string(expected) + ", got " +
            std::to_string(actual)) {}

namespace {
std::string format_real(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}
}  // namespace

StepUnderflow::StepUnderflow(double time, double step)
    : Error("step size underflow at t = " + format_real(time) + " (h = " + format_real(step) + ")"),
      time_(time),
      step_(step) {}

NoConvergence::NoConvergence(std::size_t max_iter, std::vector<double> best, double best_residual)
    : Error("no convergence after " + std::to_string(max_iter) + " iterations (best residual " +
            format_real(best_residual) + ")"),
      max_iter_(max_iter),
      best_(std::move(best)),
      best_residual_(best_residual) {}

}  // namespace resetlab
