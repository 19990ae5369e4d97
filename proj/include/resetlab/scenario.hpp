#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resetlab/integrator.hpp"
#include "resetlab/models.hpp"
#include "resetlab/reset.hpp"
#include "resetlab/stroboscopic.hpp"

namespace resetlab {

/// Reset parameters before they are bound to a state dimension.
struct ResetSpec {
    ResetKind kind = ResetKind::scalar_scale;
    double period = 1.0;
    double gamma = 0.5;
    std::vector<double> matrix;     // row-major d x d
    std::vector<double> fractions;  // empty: derived from x0
    std::optional<double> total;    // empty: sum of x0
    NegativePolicy policy = NegativePolicy::warn;
};

/// Model + reset + integrator: everything needed to build a stroboscopic map.
struct Scenario {
    std::string model = "logistic";
    ParamMap params;
    ResetSpec reset;
    IntegratorConfig integrator;

    ModelSpec build_model() const;
    ResetRule build_rule(const StateVector& x0) const;
    StroboscopicMap build_map(const StateVector& x0) const;

    /// Copy with one parameter replaced. "gamma", "T" and "N0" address the
    /// reset; any other name is a model parameter.
    Scenario with_parameter(const std::string& name, double value) const;
};

}  // namespace resetlab
