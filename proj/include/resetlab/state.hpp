#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace resetlab {

using Matrix = Eigen::MatrixXd;

/// A point in R^d. Non-empty and finite by construction.
class StateVector {
public:
    explicit StateVector(std::vector<double> values);
    StateVector(std::initializer_list<double> values);

    static StateVector from_span(std::span<const double> values);

    std::size_t dim() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& to_vector() const noexcept { return values_; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    double sum() const noexcept;

    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    std::vector<double> values_;
};

double norm_inf(const StateVector& x) noexcept;
double distance_inf(const StateVector& a, const StateVector& b);

}  // namespace resetlab
