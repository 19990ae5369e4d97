#include "resetlab/stroboscopic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "parallel.hpp"
#include "resetlab/errors.hpp"

namespace resetlab {

StroboscopicMap::StroboscopicMap(ModelSpec model, ResetRule rule, IntegratorConfig cfg)
    : model_(std::move(model)), rule_(std::move(rule)), cfg_(cfg) {
    if (auto d = rule_.dimension(); d && *d != model_.dim()) {
        throw DimensionMismatch("stroboscopic map reset", model_.dim(), *d);
    }
    cfg_.validate();
}

StateVector StroboscopicMap::operator()(const StateVector& x) const {
    if (x.dim() != model_.dim()) throw DimensionMismatch("stroboscopic map", model_.dim(), x.dim());
    model_.domain().check(x.values());
    const StateVector left = flow_to(model_.vector_field(), x, 0.0, rule_.period(), cfg_);
    return apply_reset(rule_, left);
}

StateVector map_eval(const StroboscopicMap& map, const StateVector& x) { return map(x); }

MapOrbit iterate_map(const StroboscopicMap& map, const StateVector& x0, std::size_t n) {
    MapOrbit orbit;
    orbit.states.reserve(n);
    StateVector x = x0;
    for (std::size_t k = 1; k <= n; ++k) {
        try {
            x = map(x);
        } catch (const DomainError& e) {
            orbit.failure = e.at_iteration(k);
            break;
        }
        orbit.states.push_back(x);
    }
    return orbit;
}

namespace {

std::vector<double> perturbed(const StateVector& x, std::size_t j, double delta) {
    std::vector<double> v = x.to_vector();
    v[j] += delta;
    return v;
}

}  // namespace

FdJacobian jacobian_fd(const std::function<StateVector(const StateVector&)>& f, const StateVector& x,
                       double h_rel) {
    if (!(h_rel > 0.0)) throw ValidationError("jacobian_fd h_rel must be > 0");
    const std::size_t d = x.dim();
    FdJacobian jac;
    jac.matrix = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    std::optional<StateVector> center;

    auto probe = [&](std::vector<double> v) -> std::optional<StateVector> {
        try {
            return f(StateVector(std::move(v)));
        } catch (const DomainError&) {
            return std::nullopt;
        } catch (const StepUnderflow&) {
            return std::nullopt;
        }
    };

    for (std::size_t j = 0; j < d; ++j) {
        const double h = std::max(h_rel, h_rel * std::abs(x[j]));
        std::vector<double> up = perturbed(x, j, h);
        std::vector<double> down = perturbed(x, j, -h);
        const double dh_up = up[j] - x[j];
        const double dh_down = x[j] - down[j];
        auto f_up = probe(std::move(up));
        auto f_down = probe(std::move(down));

        const auto col = static_cast<Eigen::Index>(j);
        if (f_up && f_down) {
            for (std::size_t i = 0; i < d; ++i) {
                jac.matrix(static_cast<Eigen::Index>(i), col) = ((*f_up)[i] - (*f_down)[i]) / (dh_up + dh_down);
            }
            continue;
        }
        if (!f_up && !f_down) {
            throw DomainError("finite-difference probes left the domain on both sides", j, x[j]);
        }
        if (!center) center = f(x);
        jac.one_sided = true;
        for (std::size_t i = 0; i < d; ++i) {
            jac.matrix(static_cast<Eigen::Index>(i), col) =
                f_up ? ((*f_up)[i] - (*center)[i]) / dh_up : ((*center)[i] - (*f_down)[i]) / dh_down;
        }
    }
    return jac;
}

FdJacobian jacobian_fd(const StroboscopicMap& map, const StateVector& x, double h_rel) {
    return jacobian_fd([&map](const StateVector& v) { return map(v); }, x, h_rel);
}

double spectral_radius(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) throw Error("eigenvalue computation failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

Stability classify(double rho, double margin) {
    if (rho < 1.0 - margin) return Stability::stable;
    if (rho > 1.0 + margin) return Stability::unstable;
    return Stability::marginal;
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "unknown";
}

std::string to_string(FixedPointMethod m) {
    switch (m) {
        case FixedPointMethod::picard: return "picard";
        case FixedPointMethod::newton_fd: return "newton_fd";
        case FixedPointMethod::automatic: return "auto";
    }
    return "unknown";
}

FixedPointMethod fixed_point_method_from_string(const std::string& name) {
    if (name == "picard") return FixedPointMethod::picard;
    if (name == "newton" || name == "newton_fd") return FixedPointMethod::newton_fd;
    if (name == "auto") return FixedPointMethod::automatic;
    throw ValidationError("unknown fixed-point method '" + name + "'; expected picard, newton or auto");
}

FixedPointReport analyze_fixed_point(const StroboscopicMap& map, const StateVector& x_star,
                                     std::size_t iterations, FixedPointMethod method, double h_rel) {
    const double residual = distance_inf(map(x_star), x_star);
    FdJacobian jac = jacobian_fd(map, x_star, h_rel);
    const double rho = spectral_radius(jac.matrix);
    return FixedPointReport{x_star,         residual, iterations, std::move(jac.matrix), jac.one_sided,
                            rho,            classify(rho), method};
}

namespace {

struct Candidate {
    StateVector x;
    double residual = std::numeric_limits<double>::infinity();

    void offer(const StateVector& v, double r) {
        if (r < residual) {
            x = v;
            residual = r;
        }
    }
};

struct SearchOutcome {
    std::optional<StateVector> root;
    std::size_t iterations = 0;
};

SearchOutcome picard(const StroboscopicMap& map, const StateVector& x0, double tol, std::size_t budget,
                     Candidate& best) {
    SearchOutcome out;
    StateVector x = x0;
    for (std::size_t k = 1; k <= budget; ++k) {
        StateVector next = map(x);
        const double step = distance_inf(next, x);
        best.offer(x, step);
        out.iterations = k;
        if (step <= tol) {
            out.root = std::move(next);
            return out;
        }
        x = std::move(next);
    }
    return out;
}

SearchOutcome newton(const StroboscopicMap& map, const StateVector& x0, double tol, std::size_t budget,
                     double h_rel, Candidate& best) {
    SearchOutcome out;
    const std::size_t d = x0.dim();
    const auto n = static_cast<Eigen::Index>(d);
    auto residual_of = [&](const StateVector& x, Eigen::VectorXd& g) {
        const StateVector px = map(x);
        g.resize(n);
        for (std::size_t i = 0; i < d; ++i) g(static_cast<Eigen::Index>(i)) = px[i] - x[i];
        return g.cwiseAbs().maxCoeff();
    };

    StateVector x = x0;
    Eigen::VectorXd g;
    double r = residual_of(x, g);
    for (std::size_t k = 1; k <= budget; ++k) {
        best.offer(x, r);
        out.iterations = k;
        if (r <= tol) {
            out.root = x;
            return out;
        }
        Matrix jac = jacobian_fd(map, x, h_rel).matrix - Matrix::Identity(n, n);
        Eigen::FullPivLU<Matrix> lu(jac);
        if (!lu.isInvertible() || jac.cwiseAbs().maxCoeff() < 1e-14) {
            throw SingularJacobian("Jacobian of P(x) - x is singular in Newton iteration " + std::to_string(k));
        }
        const Eigen::VectorXd dx = lu.solve(-g);

        // Backtrack on domain failures or residual growth.
        double lambda = 1.0;
        for (;;) {
            std::vector<double> trial(d);
            for (std::size_t i = 0; i < d; ++i) trial[i] = x[i] + lambda * dx(static_cast<Eigen::Index>(i));
            Eigen::VectorXd g_trial;
            bool ok = false;
            double r_trial = std::numeric_limits<double>::infinity();
            try {
                StateVector xt(std::move(trial));
                r_trial = residual_of(xt, g_trial);
                ok = true;
                if (r_trial < r || lambda < 1.0 / 64.0) {
                    x = std::move(xt);
                    g = std::move(g_trial);
                    r = r_trial;
                    break;
                }
            } catch (const DomainError&) {
            } catch (const StepUnderflow&) {
            } catch (const ValidationError&) {
            }
            if (!ok && lambda < 1.0 / 1024.0) {
                throw NoConvergence(k, best.x.to_vector(), best.residual);
            }
            lambda *= 0.5;
        }
    }
    best.offer(x, r);
    if (r <= tol) out.root = x;
    return out;
}

}  // namespace

FixedPointReport find_fixed_point(const StroboscopicMap& map, const StateVector& x0,
                                  const FixedPointOptions& options) {
    if (!(options.tol > 0.0)) throw ValidationError("fixed-point tol must be > 0");
    if (options.max_iter < 1) throw ValidationError("fixed-point max_iter must be >= 1");
    if (x0.dim() != map.dim()) throw DimensionMismatch("fixed-point start", map.dim(), x0.dim());

    Candidate best{x0};
    switch (options.method) {
        case FixedPointMethod::picard: {
            SearchOutcome s = picard(map, x0, options.tol, options.max_iter, best);
            if (s.root) return analyze_fixed_point(map, *s.root, s.iterations, FixedPointMethod::picard, options.h_rel);
            throw NoConvergence(options.max_iter, best.x.to_vector(), best.residual);
        }
        case FixedPointMethod::newton_fd: {
            SearchOutcome s = newton(map, x0, options.tol, options.max_iter, options.h_rel, best);
            if (s.root) return analyze_fixed_point(map, *s.root, s.iterations, FixedPointMethod::newton_fd, options.h_rel);
            throw NoConvergence(options.max_iter, best.x.to_vector(), best.residual);
        }
        case FixedPointMethod::automatic: {
            const std::size_t picard_budget = std::max<std::size_t>(1, options.max_iter / 2);
            std::size_t used = 0;
            try {
                SearchOutcome s = picard(map, x0, options.tol, picard_budget, best);
                if (s.root) return analyze_fixed_point(map, *s.root, s.iterations, FixedPointMethod::picard, options.h_rel);
                used = s.iterations;
            } catch (const DomainError&) {
                used = picard_budget;
            }
            const std::size_t newton_budget = std::max<std::size_t>(1, options.max_iter - used);
            const StateVector start = best.x;
            SearchOutcome s = newton(map, start, options.tol, newton_budget, options.h_rel, best);
            if (s.root) {
                return analyze_fixed_point(map, *s.root, used + s.iterations, FixedPointMethod::newton_fd,
                                           options.h_rel);
            }
            throw NoConvergence(options.max_iter, best.x.to_vector(), best.residual);
        }
    }
    throw ValidationError("unknown fixed-point method");
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
}

bool Box::contains(const StateVector& x) const {
    if (x.dim() != lo.size()) return false;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
}

void Box::validate() const {
    if (lo.empty() || lo.size() != hi.size()) throw ValidationError("box bounds need matching non-empty lo/hi");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(hi[i] > lo[i])) {
            throw ValidationError("box coordinate " + std::to_string(i) + " needs finite lo < hi");
        }
    }
}

namespace {

std::vector<double> grid_point(const Box& box, std::size_t index, const std::vector<std::size_t>& counts,
                               bool cell_centers) {
    std::vector<double> p(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
        const std::size_t m = index % counts[i];
        index /= counts[i];
        const double width = box.hi[i] - box.lo[i];
        if (cell_centers) {
            p[i] = box.lo[i] + (static_cast<double>(m) + 0.5) * width / static_cast<double>(counts[i]);
        } else if (counts[i] == 1) {
            p[i] = box.lo[i] + 0.5 * width;
        } else {
            p[i] = (m + 1 == counts[i]) ? box.hi[i]
                                        : box.lo[i] + width * static_cast<double>(m) /
                                                          static_cast<double>(counts[i] - 1);
        }
    }
    return p;
}

std::size_t product(const std::vector<std::size_t>& counts) {
    std::size_t n = 1;
    for (auto c : counts) n *= c;
    return n;
}

}  // namespace

ContractionEstimate estimate_contraction(const StroboscopicMap& map, const Box& region,
                                         std::size_t samples_per_axis, unsigned workers) {
    region.validate();
    if (region.dim() != map.dim()) throw DimensionMismatch("contraction region", map.dim(), region.dim());
    if (samples_per_axis < 1) throw ValidationError("contraction needs at least one sample per axis");

    const std::vector<std::size_t> counts(region.dim(), samples_per_axis);
    const std::size_t total = product(counts);
    struct Sample {
        bool valid = false;
        double norm = 0.0;
        bool inside = false;
        std::string failure;
    };
    std::vector<Sample> samples(total);
    detail::parallel_for(total, workers, [&](std::size_t idx) {
        Sample& s = samples[idx];
        try {
            StateVector x(grid_point(region, idx, counts, false));
            s.norm = spectral_norm(jacobian_fd(map, x).matrix);
            s.inside = region.contains(map(x));
            s.valid = true;
        } catch (const std::exception& e) {
            s.failure = "sample " + std::to_string(idx) + ": " + e.what();
        }
    });

    ContractionEstimate est;
    est.invariant = true;
    for (const Sample& s : samples) {
        if (!s.valid) {
            ++est.invalid_samples;
            est.failures.push_back(s.failure);
            continue;
        }
        ++est.valid_samples;
        est.L_hat = std::max(est.L_hat, s.norm);
        est.invariant = est.invariant && s.inside;
    }
    if (est.valid_samples == 0) est.invariant = false;
    est.contractive = est.valid_samples > 0 && est.L_hat < 1.0;
    est.certified = est.contractive && est.invariant;
    return est;
}

BasinGrid basin_scan(const StroboscopicMap& map, const BasinSpec& spec, const StateVector& target,
                     const BasinOptions& options) {
    spec.bounds.validate();
    if (spec.bounds.dim() != map.dim()) throw DimensionMismatch("basin bounds", map.dim(), spec.bounds.dim());
    if (spec.resolution.size() != map.dim()) {
        throw DimensionMismatch("basin resolution", map.dim(), spec.resolution.size());
    }
    for (auto r : spec.resolution) {
        if (r < 1) throw ValidationError("basin resolution must be >= 1 per coordinate");
    }
    if (!(options.tol > 0.0)) throw ValidationError("basin tol must be > 0");
    if (target.dim() != map.dim()) throw DimensionMismatch("basin target", map.dim(), target.dim());

    const double target_residual = distance_inf(map(target), target);
    if (!(target_residual <= 10.0 * options.tol)) {
        throw InvalidTarget("basin target is not a fixed point: ||P(x) - x|| = " + std::to_string(target_residual));
    }

    const std::size_t total = product(spec.resolution);
    BasinGrid grid;
    grid.bounds = spec.bounds;
    grid.resolution = spec.resolution;
    grid.cells.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        grid.cells.push_back(BasinCell{StateVector(grid_point(spec.bounds, idx, spec.resolution, true))});
    }

    detail::parallel_for(total, options.workers, [&](std::size_t idx) {
        BasinCell& cell = grid.cells[idx];
        StateVector x = cell.center;
        if (distance_inf(x, target) <= options.tol) {
            cell.converged = true;
            return;
        }
        for (std::size_t k = 1; k <= options.max_iter; ++k) {
            cell.iterations = k;
            try {
                x = map(x);
            } catch (const Error&) {
                cell.invalid = true;
                return;
            }
            if (distance_inf(x, target) <= options.tol) {
                cell.converged = true;
                return;
            }
        }
    });

    for (const BasinCell& c : grid.cells) {
        if (c.converged) ++grid.converged_count;
        if (c.invalid) ++grid.invalid_count;
    }
    const double volume = spec.bounds.volume();
    grid.cell_volume = volume / static_cast<double>(total);
    grid.measure = volume * (static_cast<double>(grid.converged_count) / static_cast<double>(total));
    return grid;
}

std::vector<SweepRow> parameter_sweep(const std::function<StroboscopicMap(double)>& family,
                                      std::span<const double> values, const StateVector& x0,
                                      const FixedPointOptions& options, unsigned workers) {
    std::vector<SweepRow> rows(values.size());
    detail::parallel_for(values.size(), workers, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.value = values[i];
        try {
            const StroboscopicMap map = family(values[i]);
            FixedPointReport rep = find_fixed_point(map, x0, options);
            row.x_star = rep.x_star;
            row.spectral_radius = rep.spectral_radius;
            row.classification = rep.classification;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

}  // namespace resetlab
