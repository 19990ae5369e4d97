#include "resetlab/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resetlab/errors.hpp"

namespace resetlab {

StateVector::StateVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("state vector must have at least one coordinate");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw ValidationError("state coordinate " + std::to_string(i) + " is not finite");
        }
    }
}

StateVector::StateVector(std::initializer_list<double> values)
    : StateVector(std::vector<double>(values)) {}

StateVector StateVector::from_span(std::span<const double> values) {
    return StateVector(std::vector<double>(values.begin(), values.end()));
}

double StateVector::sum() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

double norm_inf(const StateVector& x) noexcept {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double distance_inf(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("distance", a.dim(), b.dim());
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace resetlab
