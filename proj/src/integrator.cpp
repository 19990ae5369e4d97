#include "resetlab/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "resetlab/errors.hpp"

namespace resetlab {

void IntegratorConfig::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("integrator step h must be > 0");
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ValidationError("rel_tol must lie in (0, 1)");
    if (!(abs_tol > 0.0 && abs_tol < 1.0)) throw ValidationError("abs_tol must lie in (0, 1)");
    if (!(max_step > 0.0) || !std::isfinite(max_step)) throw ValidationError("max_step must be > 0");
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_finite_state(std::span<const double> y, double t) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i])) {
            throw DomainError("state is not finite", i, y[i]).at_time(t, {y.begin(), y.end()});
        }
    }
}

class Stepper {
public:
    Stepper(const VectorField& f, const IntegratorConfig& cfg, const StateVector& x0, double t0)
        : f_(f), cfg_(cfg), t_(t0), y_(x0.to_vector()) {
        const std::size_t d = y_.size();
        for (auto& k : k_) k.assign(d, 0.0);
        tmp_.assign(d, 0.0);
        y5_.assign(d, 0.0);
    }

    const std::vector<double>& state() const { return y_; }

    void advance_to(double b) {
        if (cfg_.method == IntegrationMethod::fixed_rk4) {
            advance_rk4(b);
        } else {
            advance_adaptive(b);
        }
        t_ = b;
    }

private:
    void eval(double t, std::span<const double> x, std::span<double> out) { f_(t, x, out); }

    void rk4(double t, double h) {
        const std::size_t d = y_.size();
        auto& k1 = k_[0];
        auto& k2 = k_[1];
        auto& k3 = k_[2];
        auto& k4 = k_[3];
        eval(t, y_, k1);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y_[i] + 0.5 * h * k1[i];
        eval(t + 0.5 * h, tmp_, k2);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y_[i] + 0.5 * h * k2[i];
        eval(t + 0.5 * h, tmp_, k3);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y_[i] + h * k3[i];
        eval(t + h, tmp_, k4);
        for (std::size_t i = 0; i < d; ++i) {
            y_[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    void advance_rk4(double b) {
        const double a = t_;
        const double h = cfg_.h;
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / h - 1e-9)));
        for (std::size_t k = 0; k < n; ++k) {
            const double ts = a + static_cast<double>(k) * h;
            const double te = (k + 1 == n) ? b : a + static_cast<double>(k + 1) * h;
            try {
                rk4(ts, te - ts);
            } catch (const DomainError& e) {
                throw e.at_time(ts, y_);
            }
            check_finite_state(y_, te);
        }
    }

    double error_norm() const {
        double err = 0.0;
        const auto& k = k_;
        for (std::size_t i = 0; i < y_.size(); ++i) {
            const double ei = h_try_ * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                                        e6 * k[5][i] + e7 * k[6][i]);
            const double scale = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(y5_[i]));
            err = std::max(err, std::abs(ei) / scale);
        }
        return err;
    }

    // One trial step from (t_, y_) with size h_try_; k_[0] must hold f(t_, y_).
    double dopri_trial(double t) {
        const std::size_t d = y_.size();
        const double h = h_try_;
        auto& k = k_;
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y_[i] + h * a21 * k[0][i];
        eval(t + c2 * h, tmp_, k[1]);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y_[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
        eval(t + c3 * h, tmp_, k[2]);
        for (std::size_t i = 0; i < d; ++i)
            tmp_[i] = y_[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
        eval(t + c4 * h, tmp_, k[3]);
        for (std::size_t i = 0; i < d; ++i)
            tmp_[i] = y_[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
        eval(t + c5 * h, tmp_, k[4]);
        for (std::size_t i = 0; i < d; ++i)
            tmp_[i] = y_[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                                   a65 * k[4][i]);
        eval(t + h, tmp_, k[5]);
        for (std::size_t i = 0; i < d; ++i)
            y5_[i] = y_[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] +
                                  b6 * k[5][i]);
        if (!all_finite(y5_)) return std::numeric_limits<double>::infinity();
        eval(t + h, y5_, k[6]);
        if (!all_finite(k[6])) return std::numeric_limits<double>::infinity();
        return error_norm();
    }

    double initial_step(double span) {
        const std::size_t d = y_.size();
        auto& f0 = k_[0];
        auto rms = [&](auto&& component) {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[i]);
                const double v = component(i) / sc;
                s += v * v;
            }
            return std::sqrt(s / static_cast<double>(d));
        };
        const double d0 = rms([&](std::size_t i) { return y_[i]; });
        const double d1 = rms([&](std::size_t i) { return f0[i]; });
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min({h0, cfg_.max_step, span});
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y_[i] + h0 * f0[i];
        auto& f1 = k_[1];
        try {
            eval(t_ + h0, tmp_, f1);
        } catch (const DomainError&) {
            return h0;
        }
        if (!all_finite(f1)) return h0;
        const double d2 = rms([&](std::size_t i) { return f1[i] - f0[i]; }) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        return std::min({100.0 * h0, h1, cfg_.max_step});
    }

    void advance_adaptive(double b) {
        if (!fsal_valid_) {
            try {
                eval(t_, y_, k_[0]);
            } catch (const DomainError& e) {
                throw e.at_time(t_, y_);
            }
            check_finite_state(k_[0], t_);
            fsal_valid_ = true;
        }
        if (!(h_ > 0.0)) h_ = initial_step(b - t_);

        double t = t_;
        std::optional<DomainError> pending;
        while (t < b) {
            bool clipped = false;
            h_try_ = std::min(h_, cfg_.max_step);
            if (t + 1.01 * h_try_ >= b) {
                h_try_ = b - t;
                clipped = true;
            }
            double err;
            try {
                err = dopri_trial(t);
            } catch (const DomainError& e) {
                pending = e;
                err = std::numeric_limits<double>::infinity();
            }
            if (err <= 1.0) {
                t = clipped ? b : t + h_try_;
                std::swap(y_, y5_);
                std::swap(k_[0], k_[6]);
                pending.reset();
                const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                const double proposal = h_try_ * fac;
                h_ = clipped ? std::max(h_, proposal) : proposal;
            } else {
                const double fac = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0) : 0.25;
                h_ = h_try_ * fac;
                const double min_step = 16.0 * kEps * std::max(1.0, std::abs(t));
                if (h_ < min_step) {
                    if (pending) throw pending->at_time(t, y_);
                    throw StepUnderflow(t, h_);
                }
            }
        }
    }

    const VectorField& f_;
    const IntegratorConfig& cfg_;
    double t_;
    std::vector<double> y_;
    std::array<std::vector<double>, 7> k_;
    std::vector<double> tmp_;
    std::vector<double> y5_;
    double h_ = 0.0;
    double h_try_ = 0.0;
    bool fsal_valid_ = false;
};

}  // namespace

StateVector rk4_step(const VectorField& f, double t, const StateVector& x, double h) {
    if (!(h > 0.0)) throw ValidationError("rk4 step h must be > 0");
    IntegratorConfig cfg;
    cfg.method = IntegrationMethod::fixed_rk4;
    cfg.h = h;
    Stepper stepper(f, cfg, x, t);
    stepper.advance_to(t + h);
    return StateVector(stepper.state());
}

TrajectorySegment integrate(const VectorField& f, const StateVector& x0, double t0, double t1,
                            const IntegratorConfig& cfg, std::size_t n_samples) {
    cfg.validate();
    if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
        throw ValidationError("integration interval must satisfy t1 > t0");
    }
    if (n_samples < 2) throw ValidationError("integrate needs at least 2 samples");

    TrajectorySegment seg;
    seg.t_start = t0;
    seg.t_end = t1;
    seg.times.reserve(n_samples);
    seg.states.reserve(n_samples);
    const double span = t1 - t0;
    const double denom = static_cast<double>(n_samples - 1);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = (i + 1 == n_samples) ? t1 : t0 + span * (static_cast<double>(i) / denom);
        if (i > 0 && !(t > seg.times.back())) {
            throw ValidationError("sample times are not strictly increasing; reduce n_samples");
        }
        seg.times.push_back(t);
    }

    seg.states.push_back(x0);
    Stepper stepper(f, cfg, x0, t0);
    for (std::size_t i = 1; i < n_samples; ++i) {
        stepper.advance_to(seg.times[i]);
        seg.states.emplace_back(stepper.state());
    }
    return seg;
}

StateVector flow_to(const VectorField& f, const StateVector& x0, double t0, double t1,
                    const IntegratorConfig& cfg) {
    return integrate(f, x0, t0, t1, cfg, 2).final_state();
}

}  // namespace resetlab
