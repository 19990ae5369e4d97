#include "resetlab/scenario.hpp"

#include <cmath>

#include "resetlab/errors.hpp"

namespace resetlab {

ModelSpec Scenario::build_model() const { return make_model(model, params); }

ResetRule Scenario::build_rule(const StateVector& x0) const {
    switch (reset.kind) {
        case ResetKind::scalar_scale: return ResetRule::scalar_scale(reset.gamma, reset.period);
        case ResetKind::linear_map: {
            const std::size_t d = x0.dim();
            if (reset.matrix.size() != d * d) {
                throw ValidationError("linear_map matrix needs " + std::to_string(d * d) +
                                      " entries (row-major), got " + std::to_string(reset.matrix.size()));
            }
            const auto n = static_cast<Eigen::Index>(d);
            Matrix m(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) m(i, j) = reset.matrix[static_cast<std::size_t>(i * n + j)];
            }
            return ResetRule::linear_map(std::move(m), reset.period);
        }
        case ResetKind::replenishment: {
            if (reset.fractions.empty() && !reset.total) {
                return ResetRule::replenishment_from_initial(x0, reset.period, reset.policy);
            }
            std::vector<double> c = reset.fractions;
            if (c.empty()) {
                const double s = x0.sum();
                if (!(s > 0.0)) throw ValidationError("replenishment from x0 needs sum(x0) > 0");
                for (double v : x0) c.push_back(v / s);
            }
            return ResetRule::replenishment(std::move(c), reset.total ? *reset.total : x0.sum(), reset.period,
                                            reset.policy);
        }
    }
    throw ValidationError("unknown reset kind");
}

StroboscopicMap Scenario::build_map(const StateVector& x0) const {
    return StroboscopicMap(build_model(), build_rule(x0), integrator);
}

Scenario Scenario::with_parameter(const std::string& name, double value) const {
    Scenario s = *this;
    if (name == "gamma") {
        s.reset.gamma = value;
    } else if (name == "T") {
        s.reset.period = value;
    } else if (name == "N0") {
        s.reset.total = value;
    } else {
        s.params[name] = value;
    }
    return s;
}

}  // namespace resetlab
