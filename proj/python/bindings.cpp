#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resetlab/commands.hpp"
#include "resetlab/config.hpp"
#include "resetlab/errors.hpp"
#include "resetlab/integrator.hpp"
#include "resetlab/io.hpp"
#include "resetlab/models.hpp"
#include "resetlab/reset.hpp"
#include "resetlab/stroboscopic.hpp"

namespace py = pybind11;
using namespace resetlab;

namespace {

using Vec = std::vector<double>;

StateVector to_state(const Vec& v) { return StateVector(v); }

Matrix stack(const std::vector<StateVector>& states) {
    if (states.empty()) return Matrix(0, 0);
    Matrix m(static_cast<Eigen::Index>(states.size()), static_cast<Eigen::Index>(states.front().dim()));
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = 0; j < states[i].dim(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = states[i][j];
        }
    }
    return m;
}

Box to_box(const Vec& lo, const Vec& hi) {
    Box b{lo, hi};
    b.validate();
    return b;
}

IntegrationMethod method_from(const std::string& s) {
    if (s == "adaptive") return IntegrationMethod::adaptive_embedded;
    if (s == "rk4") return IntegrationMethod::fixed_rk4;
    throw ValidationError("integrator method must be 'adaptive' or 'rk4'");
}

std::string run_command(const std::string& command, const std::string& text, const std::vector<std::string>& overrides) {
    std::ostringstream out;
    if (command == "models") {
        run_models(out);
        return out.str();
    }
    const RunConfig cfg = parse_config(text, overrides);
    if (command == "simulate") {
        run_simulate(cfg, out);
    } else if (command == "fixpoint") {
        run_fixpoint(cfg, out);
    } else if (command == "basin") {
        run_basin(cfg, out);
    } else if (command == "sweep") {
        run_sweep(cfg, out);
    } else {
        throw ValidationError("unknown command '" + command + "'");
    }
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hybrid simulation and stroboscopic-map analysis of periodically reset ODEs";

    auto base = py::register_exception<Error>(m, "ResetlabError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
    py::register_exception<StepUnderflow>(m, "StepUnderflow", base.ptr());
    py::register_exception<NegativePopulation>(m, "NegativePopulation", base.ptr());
    py::register_exception<Unsupported>(m, "Unsupported", base.ptr());
    py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
    py::register_exception<SingularJacobian>(m, "SingularJacobian", base.ptr());
    py::register_exception<InvalidTarget>(m, "InvalidTarget", base.ptr());

    py::class_<IntegratorConfig>(m, "IntegratorConfig")
        .def(py::init([](const std::string& method, double h, double rel_tol, double abs_tol, double max_step) {
                 IntegratorConfig c;
                 c.method = method_from(method);
                 c.h = h;
                 c.rel_tol = rel_tol;
                 c.abs_tol = abs_tol;
                 c.max_step = max_step;
                 c.validate();
                 return c;
             }),
             py::arg("method") = "adaptive", py::arg("h") = 1e-2, py::arg("rel_tol") = 1e-10,
             py::arg("abs_tol") = 1e-12, py::arg("max_step") = 0.5)
        .def_property_readonly("method",
                               [](const IntegratorConfig& c) {
                                   return c.method == IntegrationMethod::fixed_rk4 ? "rk4" : "adaptive";
                               })
        .def_readonly("h", &IntegratorConfig::h)
        .def_readonly("rel_tol", &IntegratorConfig::rel_tol)
        .def_readonly("abs_tol", &IntegratorConfig::abs_tol)
        .def_readonly("max_step", &IntegratorConfig::max_step);

    py::class_<ModelSpec>(m, "Model")
        .def(py::init([](const std::string& name, const ParamMap& params) { return make_model(name, params); }),
             py::arg("name"), py::arg("params") = ParamMap{})
        .def_property_readonly("name", &ModelSpec::name)
        .def_property_readonly("dim", &ModelSpec::dim)
        .def_property_readonly("params", &ModelSpec::params)
        .def_property_readonly("has_closed_form", &ModelSpec::has_closed_form)
        .def_property_readonly("equilibria",
                               [](const ModelSpec& s) {
                                   std::vector<Vec> out;
                                   for (const auto& e : s.equilibria()) out.push_back(e.to_vector());
                                   return out;
                               })
        .def_property_readonly("equilibrium_sets", &ModelSpec::equilibrium_sets)
        .def("rhs", [](const ModelSpec& s, const Vec& x) { return rhs_eval(s, to_state(x)).to_vector(); })
        .def("closed_form",
             [](const ModelSpec& s, const Vec& x0, double t) { return closed_form_eval(s, to_state(x0), t).to_vector(); })
        .def("__repr__", [](const ModelSpec& s) { return "<resetlab.Model " + s.name() + ">"; });

    m.def("model_names", &model_names);

    m.def(
        "integrate",
        [](const ModelSpec& model, const Vec& x0, double t0, double t1, const IntegratorConfig& cfg,
           std::size_t n_samples) {
            TrajectorySegment seg = integrate(model.vector_field(), to_state(x0), t0, t1, cfg, n_samples);
            return py::make_tuple(seg.times, stack(seg.states));
        },
        py::arg("model"), py::arg("x0"), py::arg("t0"), py::arg("t1"), py::arg("config") = IntegratorConfig{},
        py::arg("n_samples") = 2, "Returns (times, states) with one state per row.");

    py::class_<ResetRule>(m, "ResetRule")
        .def_static("scalar_scale", &ResetRule::scalar_scale, py::arg("gamma"), py::arg("period"))
        .def_static("linear_map", &ResetRule::linear_map, py::arg("matrix"), py::arg("period"))
        .def_static(
            "replenishment",
            [](const Vec& c, double total, double period, bool strict) {
                return ResetRule::replenishment(c, total, period, strict ? NegativePolicy::error : NegativePolicy::warn);
            },
            py::arg("fractions"), py::arg("total"), py::arg("period"), py::arg("strict") = false)
        .def_static(
            "replenishment_from_initial",
            [](const Vec& x0, double period, bool strict) {
                return ResetRule::replenishment_from_initial(to_state(x0), period,
                                                             strict ? NegativePolicy::error : NegativePolicy::warn);
            },
            py::arg("x0"), py::arg("period"), py::arg("strict") = false)
        .def_property_readonly("kind", [](const ResetRule& r) { return to_string(r.kind()); })
        .def_property_readonly("period", &ResetRule::period)
        .def_property_readonly("gamma", &ResetRule::gamma)
        .def_property_readonly("matrix", &ResetRule::matrix)
        .def_property_readonly("fractions", &ResetRule::fractions)
        .def_property_readonly("total", &ResetRule::total);

    m.def("apply_reset", [](const ResetRule& rule, const Vec& x) { return apply_reset(rule, to_state(x)).to_vector(); });

    py::class_<HybridTrajectory>(m, "HybridTrajectory")
        .def_property_readonly("times",
                               [](const HybridTrajectory& h) {
                                   Vec t;
                                   for (const auto& s : h.samples) t.push_back(s.t);
                                   return t;
                               })
        .def_property_readonly("tags",
                               [](const HybridTrajectory& h) {
                                   std::vector<std::string> t;
                                   for (const auto& s : h.samples) t.push_back(to_string(s.tag));
                                   return t;
                               })
        .def_property_readonly("states",
                               [](const HybridTrajectory& h) {
                                   std::vector<StateVector> st;
                                   for (const auto& s : h.samples) st.push_back(s.state);
                                   return stack(st);
                               })
        .def_readonly("reset_times", &HybridTrajectory::reset_times)
        .def_readonly("warnings", &HybridTrajectory::warnings)
        .def("post_reset_states", [](const HybridTrajectory& h) { return stack(h.post_reset_states()); })
        .def("left_limits", [](const HybridTrajectory& h) { return stack(h.left_limits()); })
        .def(
            "to_csv",
            [](const HybridTrajectory& h, int precision) {
                std::ostringstream os;
                write_trajectory_csv(os, h, precision);
                return os.str();
            },
            py::arg("precision") = 17)
        .def_static("from_csv", [](const std::string& text) {
            std::istringstream is(text);
            return read_trajectory_csv(is);
        });

    m.def(
        "simulate_hybrid",
        [](const ModelSpec& model, const ResetRule& rule, const Vec& x0, double t0, double horizon,
           const IntegratorConfig& cfg, std::size_t samples_per_period) {
            return simulate_hybrid(model, rule, to_state(x0), t0, horizon, cfg, samples_per_period);
        },
        py::arg("model"), py::arg("rule"), py::arg("x0"), py::arg("t0") = 0.0, py::arg("horizon"),
        py::arg("config") = IntegratorConfig{}, py::arg("samples_per_period") = 100);

    py::class_<StroboscopicMap>(m, "StroboscopicMap")
        .def(py::init<ModelSpec, ResetRule, IntegratorConfig>(), py::arg("model"), py::arg("rule"),
             py::arg("config") = IntegratorConfig{})
        .def_property_readonly("dim", &StroboscopicMap::dim)
        .def("__call__", [](const StroboscopicMap& p, const Vec& x) { return p(to_state(x)).to_vector(); })
        .def(
            "iterate",
            [](const StroboscopicMap& p, const Vec& x0, std::size_t n) {
                MapOrbit orbit = iterate_map(p, to_state(x0), n);
                if (orbit.failure && orbit.states.empty()) throw *orbit.failure;
                return stack(orbit.states);
            },
            py::arg("x0"), py::arg("n"), "Iterates x_1..x_n, one per row; a domain failure truncates the orbit.")
        .def(
            "jacobian",
            [](const StroboscopicMap& p, const Vec& x, double h_rel) { return jacobian_fd(p, to_state(x), h_rel).matrix; },
            py::arg("x"), py::arg("h_rel") = 1e-6);

    py::class_<FixedPointReport>(m, "FixedPointReport")
        .def_property_readonly("x_star", [](const FixedPointReport& r) { return r.x_star.to_vector(); })
        .def_readonly("residual", &FixedPointReport::residual)
        .def_readonly("iterations", &FixedPointReport::iterations)
        .def_readonly("jacobian", &FixedPointReport::jacobian)
        .def_readonly("spectral_radius", &FixedPointReport::spectral_radius)
        .def_property_readonly("classification", [](const FixedPointReport& r) { return to_string(r.classification); })
        .def_property_readonly("method", [](const FixedPointReport& r) { return to_string(r.method); });

    m.def(
        "find_fixed_point",
        [](const StroboscopicMap& p, const Vec& x0, double tol, std::size_t max_iter, const std::string& method) {
            FixedPointOptions o;
            o.tol = tol;
            o.max_iter = max_iter;
            o.method = fixed_point_method_from_string(method);
            return find_fixed_point(p, to_state(x0), o);
        },
        py::arg("map"), py::arg("x0"), py::arg("tol") = 1e-10, py::arg("max_iter") = 1000, py::arg("method") = "auto");

    m.def(
        "estimate_contraction",
        [](const StroboscopicMap& p, const Vec& lo, const Vec& hi, std::size_t samples_per_axis) {
            ContractionEstimate e;
            {
                py::gil_scoped_release release;
                e = estimate_contraction(p, to_box(lo, hi), samples_per_axis);
            }
            py::dict d;
            d["L_hat"] = e.L_hat;
            d["contractive"] = e.contractive;
            d["invariant"] = e.invariant;
            d["certified"] = e.certified;
            d["rigorous"] = false;
            d["valid_samples"] = e.valid_samples;
            d["invalid_samples"] = e.invalid_samples;
            return d;
        },
        py::arg("map"), py::arg("lo"), py::arg("hi"), py::arg("samples_per_axis") = 50);

    m.def(
        "basin_scan",
        [](const StroboscopicMap& p, const Vec& lo, const Vec& hi, const std::vector<std::size_t>& cells,
           const Vec& target, double tol, std::size_t max_iter, unsigned workers) {
            BasinGrid g = [&] {
                py::gil_scoped_release release;
                return basin_scan(p, BasinSpec{to_box(lo, hi), cells}, to_state(target),
                                  BasinOptions{tol, max_iter, workers});
            }();
            std::vector<StateVector> centers;
            std::vector<bool> converged, invalid;
            std::vector<std::size_t> iterations;
            for (const auto& c : g.cells) {
                centers.push_back(c.center);
                converged.push_back(c.converged);
                invalid.push_back(c.invalid);
                iterations.push_back(c.iterations);
            }
            py::dict d;
            d["centers"] = stack(centers);
            d["converged"] = converged;
            d["invalid"] = invalid;
            d["iterations"] = iterations;
            d["measure"] = g.measure;
            d["converged_count"] = g.converged_count;
            d["invalid_count"] = g.invalid_count;
            return d;
        },
        py::arg("map"), py::arg("lo"), py::arg("hi"), py::arg("cells"), py::arg("target"), py::arg("tol") = 1e-8,
        py::arg("max_iter") = 500, py::arg("workers") = 0);

    m.def(
        "parameter_sweep",
        [](const std::function<StroboscopicMap(double)>& family, const Vec& values, const Vec& x0, double tol,
           std::size_t max_iter) {
            FixedPointOptions o;
            o.tol = tol;
            o.max_iter = max_iter;
            // The family is a Python callable, so rows run on this thread.
            const auto rows = parameter_sweep(family, values, to_state(x0), o, 1);
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["value"] = r.value;
                d["x_star"] = r.x_star ? py::cast(r.x_star->to_vector()) : py::none();
                d["spectral_radius"] = r.spectral_radius ? py::cast(*r.spectral_radius) : py::none();
                d["classification"] = r.classification ? py::cast(to_string(*r.classification)) : py::none();
                d["error"] = r.error;
                out.append(d);
            }
            return out;
        },
        py::arg("family"), py::arg("values"), py::arg("x0"), py::arg("tol") = 1e-10, py::arg("max_iter") = 1000);

    m.def("run_command", &run_command, py::arg("command"), py::arg("config") = "",
          py::arg("overrides") = std::vector<std::string>{},
          "Runs a CLI subcommand in-process and returns its summary output.");
}
