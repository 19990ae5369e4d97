#include "resetlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "resetlab/errors.hpp"

namespace resetlab {

bool CoordinateBound::contains(double v) const noexcept {
    if (!std::isfinite(v)) return false;
    const bool above = lower_open ? v > lower : v >= lower;
    const bool below = upper_open ? v < upper : v <= upper;
    return above && below;
}

bool Domain::contains(std::span<const double> x) const noexcept {
    if (x.size() != bounds.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!bounds[i].contains(x[i])) return false;
    }
    return true;
}

void Domain::check(std::span<const double> x) const {
    if (x.size() != bounds.size()) throw DimensionMismatch("model domain", bounds.size(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto& b = bounds[i];
        if (b.contains(x[i])) continue;
        std::ostringstream os;
        os.precision(17);
        if (!std::isfinite(x[i])) {
            os << "coordinate is not finite";
        } else {
            os << "outside " << (b.lower_open ? "(" : "[") << b.lower << ", " << b.upper
               << (b.upper_open ? ")" : "]");
        }
        throw DomainError(os.str(), i, x[i]);
    }
}

ModelSpec::ModelSpec(std::string name, std::size_t dim, ParamMap params, Domain domain, Rhs rhs,
                     ClosedForm closed_form, std::vector<StateVector> equilibria,
                     std::vector<std::string> equilibrium_sets, std::string description)
    : name_(std::move(name)),
      dim_(dim),
      params_(std::move(params)),
      domain_(std::move(domain)),
      rhs_(std::move(rhs)),
      closed_form_(std::move(closed_form)),
      equilibria_(std::move(equilibria)),
      equilibrium_sets_(std::move(equilibrium_sets)),
      description_(std::move(description)) {
    if (domain_.bounds.size() != dim_) throw DimensionMismatch("domain", dim_, domain_.bounds.size());
}

double ModelSpec::param(const std::string& key) const {
    auto it = params_.find(key);
    if (it == params_.end()) throw ValidationError("model '" + name_ + "' has no parameter '" + key + "'");
    return it->second;
}

void ModelSpec::rhs(std::span<const double> x, std::span<double> dxdt) const {
    if (dxdt.size() != dim_) throw DimensionMismatch("rhs output", dim_, dxdt.size());
    domain_.check(x);
    rhs_(x, dxdt);
}

VectorField ModelSpec::vector_field() const {
    return [domain = domain_, rhs = rhs_](double, std::span<const double> x, std::span<double> dxdt) {
        domain.check(x);
        rhs(x, dxdt);
    };
}

StateVector ModelSpec::closed_form(const StateVector& x0, double t) const {
    if (!closed_form_) throw Unsupported("model '" + name_ + "' has no closed-form solution");
    if (x0.dim() != dim_) throw DimensionMismatch("closed form", dim_, x0.dim());
    domain_.check(x0.values());
    return closed_form_(x0, t);
}

ParamMap CollegeParams::to_map() const {
    return {{"d1", d1},   {"d2", d2},   {"d3", d3},   {"d4", d4},   {"r21", r21}, {"r31", r31},
            {"r23", r23}, {"r24", r24}, {"r42", r42}, {"r43", r43}, {"s12", s12}, {"s23", s23},
            {"s24", s24}, {"s42", s42}, {"s43", s43}, {"n12", n12}, {"n24", n24}};
}

CollegeParams CollegeParams::from_map(const ParamMap& params) {
    CollegeParams p;
    const std::pair<const char*, double*> fields[] = {
        {"d1", &p.d1},   {"d2", &p.d2},   {"d3", &p.d3},   {"d4", &p.d4},   {"r21", &p.r21},
        {"r31", &p.r31}, {"r23", &p.r23}, {"r24", &p.r24}, {"r42", &p.r42}, {"r43", &p.r43},
        {"s12", &p.s12}, {"s23", &p.s23}, {"s24", &p.s24}, {"s42", &p.s42}, {"s43", &p.s43},
        {"n12", &p.n12}, {"n24", &p.n24}};
    for (const auto& [key, value] : params) {
        auto it = std::find_if(std::begin(fields), std::end(fields),
                               [&](const auto& f) { return key == f.first; });
        if (it == std::end(fields)) throw ValidationError("college model has no parameter '" + key + "'");
        *it->second = value;
    }
    p.validate();
    return p;
}

void CollegeParams::validate() const {
    for (const auto& [key, value] : to_map()) {
        if (!(value >= 0.0) || !std::isfinite(value)) {
            throw ValidationError("college rate '" + key + "' must be a finite value >= 0");
        }
    }
}

namespace {

using Bound = CoordinateBound;
constexpr double kInf = std::numeric_limits<double>::infinity();

const Bound kFree{};
const Bound kPositive{0.0, true, kInf, false};
const Bound kNonNegative{0.0, false, kInf, false};

struct CatalogEntry {
    std::string name;
    std::size_t dim;
    ParamMap defaults;
    std::string description;
};

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"malthus_growth", 1, {{"alpha", 1.0}}, "exponential growth dx/dt = alpha x"},
        {"malthus_decay", 1, {{"alpha", 1.0}}, "exponential decay dx/dt = -alpha x"},
        {"logistic", 1, {{"alpha", 1.0}, {"beta", 0.9}}, "logistic growth dx/dt = alpha x (1 - x/beta)"},
        {"gompertz", 1, {{"alpha", 1.0}}, "Gompertz growth dx/dt = -alpha x ln x, x > 0"},
        {"logistic_coupled",
         2,
         {{"alpha", 0.5}, {"beta_cap", 0.9}, {"beta_couple", 0.9}},
         "dx/dt = alpha x (1 - x/beta_cap), dy/dt = beta_couple x y"},
        {"gompertz_coupled",
         2,
         {{"alpha", 1.0}, {"beta", 1.0}},
         "dx/dt = -alpha x ln x, dy/dt = -beta y ln x, x > 0"},
        {"college", 4, CollegeParams{}.to_map(),
         "four-class college drinking model (default rates are synthetic placeholders)"},
        {"zero_field", 1, {{"dim", 1.0}}, "dx/dt = 0 in dimension dim (test model)"},
    };
    return entries;
}

const CatalogEntry& find_entry(std::string_view name) {
    for (const auto& e : catalog()) {
        if (e.name == name) return e;
    }
    std::string msg = "unknown model '" + std::string(name) + "'; available models:";
    for (const auto& e : catalog()) msg += " " + e.name;
    throw ValidationError(msg);
}

ParamMap merge_params(const CatalogEntry& entry, const ParamMap& overrides) {
    ParamMap params = entry.defaults;
    for (const auto& [key, value] : overrides) {
        if (!params.contains(key)) {
            std::string msg = "model '" + entry.name + "' has no parameter '" + key + "'; expected:";
            for (const auto& [k, v] : entry.defaults) msg += " " + k;
            throw ValidationError(msg);
        }
        if (!std::isfinite(value)) throw ValidationError("parameter '" + key + "' must be finite");
        params[key] = value;
    }
    return params;
}

void require_positive(const ParamMap& params, const std::string& key) {
    if (!(params.at(key) > 0.0)) throw ValidationError("parameter '" + key + "' must be > 0");
}

ModelSpec make_malthus(const CatalogEntry& e, ParamMap p, double sign) {
    require_positive(p, "alpha");
    const double rate = sign * p.at("alpha");
    return ModelSpec(
        e.name, 1, p, Domain{{kFree}},
        [rate](std::span<const double> x, std::span<double> dx) { dx[0] = rate * x[0]; },
        [rate](const StateVector& x0, double t) { return StateVector{x0[0] * std::exp(rate * t)}; },
        {StateVector{0.0}}, {}, e.description);
}

ModelSpec make_logistic(const CatalogEntry& e, ParamMap p) {
    require_positive(p, "alpha");
    require_positive(p, "beta");
    const double alpha = p.at("alpha");
    const double beta = p.at("beta");
    return ModelSpec(
        e.name, 1, p, Domain{{kFree}},
        [alpha, beta](std::span<const double> x, std::span<double> dx) {
            dx[0] = alpha * x[0] * (1.0 - x[0] / beta);
        },
        [alpha, beta](const StateVector& x0, double t) {
            const double x = x0[0];
            return StateVector{beta * x / (x + (beta - x) * std::exp(-alpha * t))};
        },
        {StateVector{0.0}, StateVector{beta}}, {}, e.description);
}

ModelSpec make_gompertz(const CatalogEntry& e, ParamMap p) {
    require_positive(p, "alpha");
    const double alpha = p.at("alpha");
    return ModelSpec(
        e.name, 1, p, Domain{{kPositive}},
        [alpha](std::span<const double> x, std::span<double> dx) {
            dx[0] = -alpha * x[0] * std::log(x[0]);
        },
        [alpha](const StateVector& x0, double t) {
            return StateVector{std::exp(std::log(x0[0]) * std::exp(-alpha * t))};
        },
        {StateVector{1.0}}, {}, e.description);
}

ModelSpec make_logistic_coupled(const CatalogEntry& e, const ParamMap& overrides) {
    ParamMap adjusted = overrides;
    if (overrides.contains("beta_cap") && !overrides.contains("beta_couple")) {
        adjusted["beta_couple"] = overrides.at("beta_cap");
    }
    ParamMap p = merge_params(e, adjusted);
    require_positive(p, "alpha");
    require_positive(p, "beta_cap");
    const double alpha = p.at("alpha");
    const double cap = p.at("beta_cap");
    const double couple = p.at("beta_couple");
    return ModelSpec(
        e.name, 2, p, Domain{{kFree, kFree}},
        [alpha, cap, couple](std::span<const double> x, std::span<double> dx) {
            dx[0] = alpha * x[0] * (1.0 - x[0] / cap);
            dx[1] = couple * x[0] * x[1];
        },
        {}, {StateVector{cap, 0.0}}, {"x = 0 (any y)"}, e.description);
}

ModelSpec make_gompertz_coupled(const CatalogEntry& e, ParamMap p) {
    require_positive(p, "alpha");
    const double alpha = p.at("alpha");
    const double beta = p.at("beta");
    return ModelSpec(
        e.name, 2, p, Domain{{kPositive, kFree}},
        [alpha, beta](std::span<const double> x, std::span<double> dx) {
            const double lx = std::log(x[0]);
            dx[0] = -alpha * x[0] * lx;
            dx[1] = -beta * x[1] * lx;
        },
        // u = ln x decays as u0 e^{-alpha t}; ln y integrates -beta u.
        [alpha, beta](const StateVector& x0, double t) {
            const double u0 = std::log(x0[0]);
            const double decay = std::exp(-alpha * t);
            return StateVector{std::exp(u0 * decay),
                               x0[1] * std::exp(-beta * u0 * -std::expm1(-alpha * t) / alpha)};
        },
        {StateVector{1.0, 0.0}}, {"x = 1 (any y)"}, e.description);
}

ModelSpec make_college(const CatalogEntry& e, ParamMap p) {
    const CollegeParams q = CollegeParams::from_map(p);
    return ModelSpec(
        e.name, 4, q.to_map(), Domain{{kNonNegative, kNonNegative, kNonNegative, kNonNegative}},
        [q](std::span<const double> x, std::span<double> dx) {
            const double n1 = x[0], n2 = x[1], n3 = x[2], n4 = x[3];
            const double total = n1 + n2 + n3 + n4;
            if (!(total > 0.0)) throw DomainError("total population N must be > 0", 0, total);
            const double m12 = n1 * n2 / total;
            const double m23 = n2 * n3 / total;
            const double m24 = n2 * n4 / total;
            const double m43 = n4 * n3 / total;
            dx[0] = -q.d1 * n1 + q.r21 * n2 + q.r31 * n3 - q.s12 * m12 - q.n12 * m12;
            dx[1] = -q.d2 * n2 - q.r21 * n2 - q.r23 * n2 - q.r24 * n2 + q.r42 * n4 + q.s12 * m12 -
                    q.s23 * m23 + (q.s42 - q.s24) * m24 + q.n12 * m12 - q.n24 * m24;
            dx[2] = -q.d3 * n3 + q.r23 * n2 - q.r31 * n3 + q.r43 * n4 + q.s23 * m23 + q.s43 * m43;
            dx[3] = -q.d4 * n4 + q.r24 * n2 - q.r42 * n4 - q.r43 * n4 + (q.s24 - q.s42) * m24 -
                    q.s43 * m43 + q.n24 * m24;
        },
        {}, {}, {}, e.description);
}

ModelSpec make_zero_field(const CatalogEntry& e, ParamMap p) {
    const double dim_value = p.at("dim");
    if (!(dim_value >= 1.0) || dim_value != std::floor(dim_value) || dim_value > 64.0) {
        throw ValidationError("zero_field parameter 'dim' must be an integer in [1, 64]");
    }
    const auto dim = static_cast<std::size_t>(dim_value);
    return ModelSpec(
        e.name, dim, p, Domain{std::vector<Bound>(dim, kFree)},
        [](std::span<const double>, std::span<double> dx) { std::fill(dx.begin(), dx.end(), 0.0); },
        [](const StateVector& x0, double) { return x0; }, {}, {"every state"}, e.description);
}

}  // namespace

std::vector<ModelInfo> model_catalog() {
    std::vector<ModelInfo> out;
    for (const auto& e : catalog()) out.push_back({e.name, e.dim, e.defaults, e.description});
    return out;
}

std::vector<std::string> model_names() {
    std::vector<std::string> out;
    for (const auto& e : catalog()) out.push_back(e.name);
    return out;
}

ModelSpec make_model(std::string_view name, const ParamMap& params) {
    const CatalogEntry& e = find_entry(name);
    if (e.name == "logistic_coupled") return make_logistic_coupled(e, params);
    ParamMap p = merge_params(e, params);
    if (e.name == "malthus_growth") return make_malthus(e, p, 1.0);
    if (e.name == "malthus_decay") return make_malthus(e, p, -1.0);
    if (e.name == "logistic") return make_logistic(e, p);
    if (e.name == "gompertz") return make_gompertz(e, p);
    if (e.name == "gompertz_coupled") return make_gompertz_coupled(e, p);
    if (e.name == "college") return make_college(e, p);
    return make_zero_field(e, p);
}

StateVector rhs_eval(const ModelSpec& model, const StateVector& x) {
    std::vector<double> out(model.dim(), 0.0);
    model.rhs(x.values(), out);
    return StateVector(std::move(out));
}

StateVector closed_form_eval(const ModelSpec& model, const StateVector& x0, double t) {
    return model.closed_form(x0, t);
}

std::vector<StateVector> equilibria(const ModelSpec& model) { return model.equilibria(); }

}  // namespace resetlab
