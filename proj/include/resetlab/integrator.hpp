#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "resetlab/state.hpp"

namespace resetlab {

/// dx/dt = f(t, x), written into `dxdt`. Throw DomainError where undefined.
using VectorField = std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;

enum class IntegrationMethod { fixed_rk4, adaptive_embedded };

struct IntegratorConfig {
    IntegrationMethod method = IntegrationMethod::adaptive_embedded;
    double h = 1e-2;  // fixed_rk4 step
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.5;

    /// Throws ValidationError unless h > 0, tolerances in (0, 1) and max_step > 0.
    void validate() const;
};

/// States sampled at strictly increasing times, times.front() == t_start and
/// times.back() == t_end exactly.
struct TrajectorySegment {
    std::vector<double> times;
    std::vector<StateVector> states;
    double t_start = 0.0;
    double t_end = 0.0;

    const StateVector& final_state() const { return states.back(); }
};

/// One classical fourth-order Runge-Kutta step.
StateVector rk4_step(const VectorField& f, double t, const StateVector& x, double h);

/// Integrates from t0 to t1 and samples the solution at `n_samples` (>= 2)
/// uniformly spaced times including both endpoints.
///
/// Integration is clipped to every sample time, so the last sample lands on
/// t1 bit-exactly. Adaptive steps use the Dormand-Prince 5(4) pair; a stage
/// that throws DomainError rejects the step, and the error escapes (annotated
/// with time and state) only once the step can no longer shrink.
TrajectorySegment integrate(const VectorField& f, const StateVector& x0, double t0, double t1,
                            const IntegratorConfig& cfg, std::size_t n_samples);

/// Endpoint of the flow from t0 to t1.
StateVector flow_to(const VectorField& f, const StateVector& x0, double t0, double t1,
                    const IntegratorConfig& cfg);

}  // namespace resetlab
