#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resetlab/errors.hpp"
#include "resetlab/integrator.hpp"
#include "resetlab/models.hpp"
#include "resetlab/reset.hpp"
#include "resetlab/state.hpp"

namespace resetlab {

/// P(x) = R(Phi_T(x)): flow one period, then reset. Its iterates are the
/// post-reset states of the hybrid trajectory.
class StroboscopicMap {
public:
    StroboscopicMap(ModelSpec model, ResetRule rule, IntegratorConfig cfg = {});

    const ModelSpec& model() const noexcept { return model_; }
    const ResetRule& rule() const noexcept { return rule_; }
    const IntegratorConfig& config() const noexcept { return cfg_; }
    std::size_t dim() const noexcept { return model_.dim(); }

    StateVector operator()(const StateVector& x) const;

private:
    ModelSpec model_;
    ResetRule rule_;
    IntegratorConfig cfg_;
};

StateVector map_eval(const StroboscopicMap& map, const StateVector& x);

/// x_1..x_n of x_{k+1} = P(x_k). A DomainError stops the orbit; `states`
/// then holds the prefix and `failure` the error annotated with the index.
struct MapOrbit {
    std::vector<StateVector> states;
    std::optional<DomainError> failure;

    bool complete() const noexcept { return !failure.has_value(); }
};

MapOrbit iterate_map(const StroboscopicMap& map, const StateVector& x0, std::size_t n);

/// Finite-difference Jacobian. `one_sided` is set when a central probe left
/// the domain and a one-sided difference was used for some column.
struct FdJacobian {
    Matrix matrix;
    bool one_sided = false;
};

/// Column j uses step max(h_rel, h_rel * |x_j|).
FdJacobian jacobian_fd(const std::function<StateVector(const StateVector&)>& f, const StateVector& x,
                       double h_rel = 1e-6);
FdJacobian jacobian_fd(const StroboscopicMap& map, const StateVector& x, double h_rel = 1e-6);

double spectral_radius(const Matrix& m);
/// Largest singular value.
double spectral_norm(const Matrix& m);

enum class Stability { stable, unstable, marginal };

inline constexpr double kStabilityMargin = 1e-6;

Stability classify(double spectral_radius, double margin = kStabilityMargin);
std::string to_string(Stability s);

enum class FixedPointMethod {
    picard,
    newton_fd,
    /// Picard for half the budget, then Newton from the best iterate.
    automatic,
};

std::string to_string(FixedPointMethod m);
FixedPointMethod fixed_point_method_from_string(const std::string& name);

struct FixedPointOptions {
    double tol = 1e-10;
    std::size_t max_iter = 1000;
    FixedPointMethod method = FixedPointMethod::automatic;
    double h_rel = 1e-6;
};

struct FixedPointReport {
    StateVector x_star;
    double residual;  // ||P(x*) - x*||_inf
    std::size_t iterations;
    Matrix jacobian;
    bool jacobian_one_sided;
    double spectral_radius;
    Stability classification;
    FixedPointMethod method;  // picard or newton_fd: whichever produced x*
};

/// Throws NoConvergence (carrying the best iterate) or SingularJacobian.
FixedPointReport find_fixed_point(const StroboscopicMap& map, const StateVector& x0,
                                  const FixedPointOptions& options = {});

/// Residual, Jacobian and stability class at a known candidate point.
FixedPointReport analyze_fixed_point(const StroboscopicMap& map, const StateVector& x_star,
                                     std::size_t iterations, FixedPointMethod method,
                                     double h_rel = 1e-6);

/// Axis-aligned box [lo_i, hi_i].
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const noexcept { return lo.size(); }
    double volume() const;
    bool contains(const StateVector& x) const;
    void validate() const;
};

/// Numerical, non-rigorous contraction evidence on a sampled region.
struct ContractionEstimate {
    double L_hat = 0.0;         // max sampled spectral norm of the Jacobian
    bool contractive = false;   // L_hat < 1
    bool invariant = false;     // every sampled image stayed in the region
    bool certified = false;     // contractive && invariant
    std::size_t valid_samples = 0;
    std::size_t invalid_samples = 0;
    std::vector<std::string> failures;
};

/// Samples a tensor grid with `samples_per_axis` points per coordinate
/// (endpoints included). Samples whose evaluation fails are excluded and
/// listed in `failures`.
ContractionEstimate estimate_contraction(const StroboscopicMap& map, const Box& region,
                                         std::size_t samples_per_axis, unsigned workers = 0);

struct BasinSpec {
    Box bounds;
    std::vector<std::size_t> resolution;  // cells per coordinate
};

struct BasinCell {
    StateVector center;
    bool converged = false;
    std::size_t iterations = 0;
    bool invalid = false;
};

struct BasinOptions {
    double tol = 1e-8;
    std::size_t max_iter = 500;
    unsigned workers = 0;  // 0: hardware concurrency
};

/// Cells are enumerated with coordinate 0 varying fastest.
struct BasinGrid {
    Box bounds;
    std::vector<std::size_t> resolution;
    std::vector<BasinCell> cells;
    std::size_t converged_count = 0;
    std::size_t invalid_count = 0;
    double cell_volume = 0.0;
    double measure = 0.0;  // converged cells x cell volume
};

/// Iterates the map from every cell center until it is within `tol` of
/// `target`. Throws InvalidTarget if ||P(target) - target|| > 10 tol.
BasinGrid basin_scan(const StroboscopicMap& map, const BasinSpec& spec, const StateVector& target,
                     const BasinOptions& options = {});

struct SweepRow {
    double value;
    std::optional<StateVector> x_star;
    std::optional<double> spectral_radius;
    std::optional<Stability> classification;
    std::string error;  // empty on success
};

/// One fixed-point search per parameter value; `family` builds the map for a
/// value. Failures are recorded in the row and the sweep continues.
std::vector<SweepRow> parameter_sweep(const std::function<StroboscopicMap(double)>& family,
                                      std::span<const double> values, const StateVector& x0,
                                      const FixedPointOptions& options = {}, unsigned workers = 0);

}  // namespace resetlab
