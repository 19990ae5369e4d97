#include "resetlab/reset.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "resetlab/errors.hpp"

namespace resetlab {

namespace {

void check_period(double period) {
    if (!(period > 0.0) || !std::isfinite(period)) throw ValidationError("reset period T must be > 0");
}

std::string format_real(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

ResetRule ResetRule::scalar_scale(double gamma, double period) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw ValidationError("scalar_scale gamma must satisfy 0 < gamma < 1, got " + format_real(gamma));
    }
    check_period(period);
    ResetRule r;
    r.kind_ = ResetKind::scalar_scale;
    r.gamma_ = gamma;
    r.period_ = period;
    return r;
}

ResetRule ResetRule::linear_map(Matrix matrix, double period) {
    if (matrix.rows() == 0 || matrix.rows() != matrix.cols()) {
        throw ValidationError("linear_map matrix must be square and non-empty");
    }
    if (!matrix.allFinite()) throw ValidationError("linear_map matrix entries must be finite");
    check_period(period);
    ResetRule r;
    r.kind_ = ResetKind::linear_map;
    r.matrix_ = std::move(matrix);
    r.period_ = period;
    return r;
}

ResetRule ResetRule::replenishment(std::vector<double> fractions, double total, double period,
                                   NegativePolicy policy) {
    if (fractions.empty()) throw ValidationError("replenishment needs at least one fraction");
    double sum = 0.0;
    for (double c : fractions) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("replenishment fractions must be >= 0");
        sum += c;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ValidationError("replenishment fractions must sum to 1 (got " + format_real(sum) + ")");
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw ValidationError("replenishment N0 must be > 0");
    check_period(period);
    ResetRule r;
    r.kind_ = ResetKind::replenishment;
    r.fractions_ = std::move(fractions);
    r.total_ = total;
    r.period_ = period;
    r.policy_ = policy;
    return r;
}

ResetRule ResetRule::replenishment_from_initial(const StateVector& x0, double period,
                                                NegativePolicy policy) {
    const double total = x0.sum();
    if (!(total > 0.0)) throw ValidationError("replenishment from x0 needs sum(x0) > 0");
    std::vector<double> c;
    c.reserve(x0.dim());
    for (double v : x0) c.push_back(v / total);
    return replenishment(std::move(c), total, period, policy);
}

std::optional<std::size_t> ResetRule::dimension() const noexcept {
    switch (kind_) {
        case ResetKind::scalar_scale: return std::nullopt;
        case ResetKind::linear_map: return static_cast<std::size_t>(matrix_.rows());
        case ResetKind::replenishment: return fractions_.size();
    }
    return std::nullopt;
}

std::string to_string(ResetKind kind) {
    switch (kind) {
        case ResetKind::scalar_scale: return "scalar_scale";
        case ResetKind::linear_map: return "linear_map";
        case ResetKind::replenishment: return "replenishment";
    }
    return "unknown";
}

ResetKind reset_kind_from_string(const std::string& name) {
    if (name == "scalar_scale") return ResetKind::scalar_scale;
    if (name == "linear_map") return ResetKind::linear_map;
    if (name == "replenishment") return ResetKind::replenishment;
    throw ValidationError("unknown reset kind '" + name +
                          "'; available kinds: scalar_scale linear_map replenishment");
}

StateVector apply_reset(const ResetRule& rule, const StateVector& x_minus,
                        std::vector<std::string>* warnings) {
    if (auto d = rule.dimension(); d && *d != x_minus.dim()) {
        throw DimensionMismatch(to_string(rule.kind()) + " reset", *d, x_minus.dim());
    }
    const std::size_t d = x_minus.dim();
    std::vector<double> out(d);
    switch (rule.kind()) {
        case ResetKind::scalar_scale:
            for (std::size_t i = 0; i < d; ++i) out[i] = rule.gamma() * x_minus[i];
            break;
        case ResetKind::linear_map:
            for (std::size_t i = 0; i < d; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    acc += rule.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                           x_minus[j];
                }
                out[i] = acc;
            }
            break;
        case ResetKind::replenishment: {
            const double deficit = rule.total() - x_minus.sum();
            std::vector<std::string> problems;
            if (deficit < 0.0) {
                problems.push_back("negative replenishment increment: population " +
                                   format_real(x_minus.sum()) + " exceeds N0 = " + format_real(rule.total()));
            }
            for (std::size_t i = 0; i < d; ++i) {
                out[i] = x_minus[i] + rule.fractions()[i] * deficit;
                if (out[i] < 0.0) {
                    problems.push_back("replenishment left class " + std::to_string(i) +
                                       " negative (" + format_real(out[i]) + ")");
                }
            }
            if (!problems.empty()) {
                if (rule.policy() == NegativePolicy::error) throw NegativePopulation(problems.front());
                if (warnings) warnings->insert(warnings->end(), problems.begin(), problems.end());
            }
            break;
        }
    }
    return StateVector(std::move(out));
}

std::string to_string(SampleTag tag) {
    switch (tag) {
        case SampleTag::flow: return "flow";
        case SampleTag::left_limit: return "left_limit";
        case SampleTag::post_reset: return "post_reset";
    }
    return "unknown";
}

SampleTag sample_tag_from_string(const std::string& name) {
    if (name == "flow") return SampleTag::flow;
    if (name == "left_limit") return SampleTag::left_limit;
    if (name == "post_reset") return SampleTag::post_reset;
    throw ValidationError("unknown sample tag '" + name + "'");
}

std::vector<StateVector> HybridTrajectory::left_limits() const {
    std::vector<StateVector> out;
    for (const auto& s : samples) {
        if (s.tag == SampleTag::left_limit) out.push_back(s.state);
    }
    return out;
}

std::vector<StateVector> HybridTrajectory::post_reset_states() const {
    std::vector<StateVector> out;
    for (const auto& s : samples) {
        if (s.tag == SampleTag::post_reset) out.push_back(s.state);
    }
    return out;
}

namespace {

// Whole periods in the horizon, tolerating rounding in horizon / T.
std::size_t whole_periods(double horizon, double period) {
    const double ratio = horizon / period;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<std::size_t>(nearest);
    return static_cast<std::size_t>(std::floor(ratio));
}

}  // namespace

HybridTrajectory simulate_hybrid(const ModelSpec& model, const ResetRule& rule,
                                 const StateVector& x0, double t0, double horizon,
                                 const IntegratorConfig& cfg, std::size_t samples_per_period) {
    if (x0.dim() != model.dim()) throw DimensionMismatch("initial state", model.dim(), x0.dim());
    if (auto d = rule.dimension(); d && *d != model.dim()) {
        throw DimensionMismatch("reset rule", model.dim(), *d);
    }
    const double period = rule.period();
    if (!(horizon >= period) || !std::isfinite(horizon)) {
        throw ValidationError("horizon must cover at least one reset period");
    }
    if (samples_per_period < 1) throw ValidationError("samples_per_period must be >= 1");
    model.domain().check(x0.values());

    const VectorField field = model.vector_field();
    const std::size_t periods = whole_periods(horizon, period);
    const double t_final = t0 + horizon;

    HybridTrajectory traj;
    traj.samples.push_back({t0, x0, SampleTag::flow});
    StateVector x = x0;
    for (std::size_t k = 0; k < periods; ++k) {
        const double start = t0 + static_cast<double>(k) * period;
        const double end = t0 + static_cast<double>(k + 1) * period;
        TrajectorySegment seg = integrate(field, x, start, end, cfg, samples_per_period + 1);
        for (std::size_t i = 1; i + 1 < seg.times.size(); ++i) {
            traj.samples.push_back({seg.times[i], seg.states[i], SampleTag::flow});
        }
        const StateVector& left = seg.states.back();
        traj.samples.push_back({end, left, SampleTag::left_limit});
        x = apply_reset(rule, left, &traj.warnings);
        traj.samples.push_back({end, x, SampleTag::post_reset});
        traj.reset_times.push_back(end);
    }

    const double tail_start = t0 + static_cast<double>(periods) * period;
    if (t_final > tail_start) {
        const double fraction = (t_final - tail_start) / period;
        const auto n = std::max<std::size_t>(
            2, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(samples_per_period))) + 1);
        TrajectorySegment seg = integrate(field, x, tail_start, t_final, cfg, n);
        for (std::size_t i = 1; i < seg.times.size(); ++i) {
            traj.samples.push_back({seg.times[i], seg.states[i], SampleTag::flow});
        }
    }
    return traj;
}

HybridTrajectory simulate_flow(const ModelSpec& model, const StateVector& x0, double t0,
                               double horizon, const IntegratorConfig& cfg, std::size_t n_samples) {
    if (x0.dim() != model.dim()) throw DimensionMismatch("initial state", model.dim(), x0.dim());
    TrajectorySegment seg = integrate(model.vector_field(), x0, t0, t0 + horizon, cfg, n_samples);
    HybridTrajectory traj;
    for (std::size_t i = 0; i < seg.times.size(); ++i) {
        traj.samples.push_back({seg.times[i], seg.states[i], SampleTag::flow});
    }
    return traj;
}

}  // namespace resetlab
