#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "resetlab/integrator.hpp"
#include "resetlab/state.hpp"

namespace resetlab {

using ParamMap = std::map<std::string, double>;

struct CoordinateBound {
    double lower = -std::numeric_limits<double>::infinity();
    bool lower_open = false;
    double upper = std::numeric_limits<double>::infinity();
    bool upper_open = false;

    bool contains(double v) const noexcept;
};

struct Domain {
    std::vector<CoordinateBound> bounds;

    bool contains(std::span<const double> x) const noexcept;
    /// Throws DomainError naming the first coordinate outside its bound.
    void check(std::span<const double> x) const;
};

/// Rates of the four-class college drinking model. All in 1/time, all >= 0.
struct CollegeParams {
    double d1 = 0.25, d2 = 0.25, d3 = 0.25, d4 = 0.25;
    double r21 = 0.1, r31 = 0.1, r23 = 0.1, r24 = 0.1, r42 = 0.1, r43 = 0.1;
    double s12 = 0.2, s23 = 0.2, s24 = 0.2, s42 = 0.2, s43 = 0.2;
    double n12 = 0.05, n24 = 0.05;

    ParamMap to_map() const;
    static CollegeParams from_map(const ParamMap& params);
    void validate() const;
};

/// A named autonomous vector field with its parameters, domain, optional
/// closed-form flow and known equilibria. Immutable once built.
class ModelSpec {
public:
    using Rhs = std::function<void(std::span<const double> x, std::span<double> dxdt)>;
    using ClosedForm = std::function<StateVector(const StateVector& x0, double t)>;

    ModelSpec(std::string name, std::size_t dim, ParamMap params, Domain domain, Rhs rhs,
              ClosedForm closed_form, std::vector<StateVector> equilibria,
              std::vector<std::string> equilibrium_sets, std::string description);

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return dim_; }
    const ParamMap& params() const noexcept { return params_; }
    double param(const std::string& key) const;
    const Domain& domain() const noexcept { return domain_; }
    const std::string& description() const noexcept { return description_; }

    bool has_closed_form() const noexcept { return static_cast<bool>(closed_form_); }
    const std::vector<StateVector>& equilibria() const noexcept { return equilibria_; }
    /// Continua of equilibria that cannot be listed point by point, e.g. "x = 1".
    const std::vector<std::string>& equilibrium_sets() const noexcept { return equilibrium_sets_; }

    /// Domain-checked right-hand side.
    void rhs(std::span<const double> x, std::span<double> dxdt) const;
    VectorField vector_field() const;
    StateVector closed_form(const StateVector& x0, double t) const;

private:
    std::string name_;
    std::size_t dim_;
    ParamMap params_;
    Domain domain_;
    Rhs rhs_;
    ClosedForm closed_form_;
    std::vector<StateVector> equilibria_;
    std::vector<std::string> equilibrium_sets_;
    std::string description_;
};

struct ModelInfo {
    std::string name;
    std::size_t dim;
    ParamMap default_params;
    std::string description;
};

/// Every model the catalog can build, in a stable order.
std::vector<ModelInfo> model_catalog();
std::vector<std::string> model_names();

/// Builds a catalog model; `params` overrides defaults. Unknown names or
/// parameters, and out-of-range values, raise ValidationError.
ModelSpec make_model(std::string_view name, const ParamMap& params = {});

StateVector rhs_eval(const ModelSpec& model, const StateVector& x);
/// Throws Unsupported for models without an analytic flow.
StateVector closed_form_eval(const ModelSpec& model, const StateVector& x0, double t);
std::vector<StateVector> equilibria(const ModelSpec& model);

}  // namespace resetlab
