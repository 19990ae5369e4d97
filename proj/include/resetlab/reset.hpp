#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "resetlab/integrator.hpp"
#include "resetlab/models.hpp"
#include "resetlab/state.hpp"

namespace resetlab {

enum class ResetKind { scalar_scale, linear_map, replenishment };

/// What a replenishment does when the population exceeds its target.
enum class NegativePolicy { warn, error };

/// A state map applied every `period` time units.
///
///   scalar_scale   x+ = gamma * x-,           0 < gamma < 1
///   linear_map     x+ = M x-
///   replenishment  x+_j = x-_j + c_j (N0 - sum_i x-_i),  c_j >= 0, sum c_j = 1
///
/// Replenishment is additive: the deficit against N0 is distributed over the
/// classes by the fractions c, so every post-reset state sums to N0.
class ResetRule {
public:
    static ResetRule scalar_scale(double gamma, double period);
    static ResetRule linear_map(Matrix matrix, double period);
    static ResetRule replenishment(std::vector<double> fractions, double total, double period,
                                   NegativePolicy policy = NegativePolicy::warn);
    /// Fractions c_j = x0_j / sum(x0) and target N0 = sum(x0).
    static ResetRule replenishment_from_initial(const StateVector& x0, double period,
                                                NegativePolicy policy = NegativePolicy::warn);

    ResetKind kind() const noexcept { return kind_; }
    double period() const noexcept { return period_; }
    double gamma() const noexcept { return gamma_; }
    const Matrix& matrix() const noexcept { return matrix_; }
    const std::vector<double>& fractions() const noexcept { return fractions_; }
    double total() const noexcept { return total_; }
    NegativePolicy policy() const noexcept { return policy_; }

    /// Required state dimension; empty for scalar_scale, which accepts any.
    std::optional<std::size_t> dimension() const noexcept;

private:
    ResetRule() = default;

    ResetKind kind_ = ResetKind::scalar_scale;
    double period_ = 1.0;
    double gamma_ = 0.5;
    Matrix matrix_;
    std::vector<double> fractions_;
    double total_ = 0.0;
    NegativePolicy policy_ = NegativePolicy::warn;
};

std::string to_string(ResetKind kind);
ResetKind reset_kind_from_string(const std::string& name);

/// Applies the reset to the left-limit state. Replenishment with a negative
/// increment or a negative resulting coordinate appends a message to
/// `warnings` (when given), or throws NegativePopulation under
/// NegativePolicy::error.
StateVector apply_reset(const ResetRule& rule, const StateVector& x_minus,
                        std::vector<std::string>* warnings = nullptr);

enum class SampleTag { flow, left_limit, post_reset };

std::string to_string(SampleTag tag);
SampleTag sample_tag_from_string(const std::string& name);

struct HybridSample {
    double t;
    StateVector state;
    SampleTag tag;

    friend bool operator==(const HybridSample&, const HybridSample&) = default;
};

/// A flow sampled between resets. Each reset instant appears twice, as a
/// left_limit sample followed by a post_reset sample with the same time.
struct HybridTrajectory {
    std::vector<HybridSample> samples;
    std::vector<double> reset_times;
    std::vector<std::string> warnings;

    std::vector<StateVector> left_limits() const;
    std::vector<StateVector> post_reset_states() const;
    std::size_t dim() const { return samples.empty() ? 0 : samples.front().state.dim(); }
};

/// Flows for one period, records the left limit, resets, and repeats from the
/// reset state. The first reset happens at t0 + T; reset k (0-based) is at
/// exactly t0 + (k + 1) T. A horizon that is not a whole number of periods
/// ends with a partial flow segment and no reset.
HybridTrajectory simulate_hybrid(const ModelSpec& model, const ResetRule& rule,
                                 const StateVector& x0, double t0, double horizon,
                                 const IntegratorConfig& cfg, std::size_t samples_per_period);

/// Reset-free reference trajectory over the same horizon, all samples tagged flow.
HybridTrajectory simulate_flow(const ModelSpec& model, const StateVector& x0, double t0,
                               double horizon, const IntegratorConfig& cfg, std::size_t n_samples);

}  // namespace resetlab
