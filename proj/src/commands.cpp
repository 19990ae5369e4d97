#include "resetlab/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "resetlab/errors.hpp"
#include "resetlab/io.hpp"
#include "resetlab/models.hpp"
#include "resetlab/reset.hpp"
#include "resetlab/stroboscopic.hpp"

namespace resetlab {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int exit_code_for(const std::exception& e) noexcept {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
        dynamic_cast<const DimensionMismatch*>(&e) || dynamic_cast<const Unsupported*>(&e) ||
        dynamic_cast<const std::invalid_argument*>(&e)) {
        return kExitInvalidInput;
    }
    return kExitNumericalFailure;
}

namespace {

ordered_json to_json(const StateVector& x) { return ordered_json(x.to_vector()); }

ordered_json to_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

ordered_json report_header(const RunConfig& cfg, const std::string& command) {
    ordered_json doc;
    doc["tool"] = "resetlab";
    doc["command"] = command;
    doc["inputs"] = cfg.entries;
    return doc;
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& path, const ordered_json& doc) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << doc.dump(2) << '\n';
}

// Fewest digits (up to 17) that read back as the same double.
std::string shortest(double v) {
    for (int p = 1; p < 17; ++p) {
        std::string s = format_real(v, p);
        if (std::stod(s) == v) return s;
    }
    return format_real(v, 17);
}

std::string bracket(const StateVector& x, int precision) {
    std::string s = "[";
    for (std::size_t i = 0; i < x.dim(); ++i) s += (i ? ", " : "") + format_real(x[i], precision);
    return s + "]";
}

ordered_json fixed_point_json(const FixedPointReport& rep) {
    ordered_json j;
    j["x_star"] = to_json(rep.x_star);
    j["residual"] = rep.residual;
    j["iterations"] = rep.iterations;
    j["method"] = to_string(rep.method);
    j["jacobian"] = to_json(rep.jacobian);
    j["jacobian_one_sided"] = rep.jacobian_one_sided;
    j["spectral_radius"] = rep.spectral_radius;
    j["classification"] = to_string(rep.classification);
    return j;
}

}  // namespace

void run_models(std::ostream& out) {
    for (const auto& info : model_catalog()) {
        out << info.name << " (dim " << info.dim << "): " << info.description << '\n';
        out << "  params:";
        for (const auto& [k, v] : info.default_params) out << ' ' << k << '=' << shortest(v);
        out << '\n';
        const ModelSpec m = make_model(info.name);
        out << "  equilibria:";
        for (const auto& e : m.equilibria()) {
            out << " [";
            for (std::size_t i = 0; i < e.dim(); ++i) out << (i ? ", " : "") << shortest(e[i]);
            out << ']';
        }
        for (const auto& s : m.equilibrium_sets()) out << " {" << s << '}';
        if (m.equilibria().empty() && m.equilibrium_sets().empty()) out << " none listed";
        out << '\n';
    }
}

void run_simulate(const RunConfig& cfg, std::ostream& out) {
    const Scenario& sc = cfg.scenario;
    const ModelSpec model = sc.build_model();
    const ResetRule rule = sc.build_rule(cfg.x0);
    const HybridTrajectory traj =
        simulate_hybrid(model, rule, cfg.x0, cfg.t0, cfg.horizon, sc.integrator, cfg.samples_per_period);

    const fs::path dir = prepare_out_dir(cfg);
    {
        std::ofstream os(dir / "trajectory.csv", std::ios::binary);
        if (!os) throw Error("cannot write " + (dir / "trajectory.csv").string());
        write_trajectory_csv(os, traj, cfg.precision);
    }

    const auto post = traj.post_reset_states();
    const StateVector& final_state = post.empty() ? traj.samples.back().state : post.back();
    const StateVector& previous = post.size() >= 2 ? post[post.size() - 2] : cfg.x0;
    const double delta = distance_inf(final_state, previous);
    const bool stabilized = delta < cfg.stabilized_tol;

    ordered_json doc = report_header(cfg, "simulate");
    ordered_json& res = doc["results"];
    res["trajectory_file"] = "trajectory.csv";
    res["samples"] = traj.samples.size();
    res["resets"] = traj.reset_times.size();
    res["final_post_reset"] = to_json(final_state);
    res["final_post_reset_sum"] = final_state.sum();
    res["last_delta"] = delta;
    res["stabilized"] = stabilized;
    res["warnings"] = traj.warnings;
    write_json(dir / "simulate.json", doc);

    out << "simulate: model=" << sc.model << " resets=" << traj.reset_times.size()
        << " final_post_reset=" << bracket(final_state, cfg.precision)
        << " last_delta=" << format_real(delta, 6) << " stabilized=" << (stabilized ? "true" : "false")
        << " warnings=" << traj.warnings.size() << '\n';
}

void run_fixpoint(const RunConfig& cfg, std::ostream& out) {
    const StroboscopicMap map = cfg.scenario.build_map(cfg.x0);
    const FixedPointReport rep = find_fixed_point(map, cfg.x0, cfg.fixpoint);

    ordered_json doc = report_header(cfg, "fixpoint");
    doc["results"] = fixed_point_json(rep);
    if (cfg.contraction_region) {
        const ContractionEstimate est =
            estimate_contraction(map, *cfg.contraction_region, cfg.contraction_samples, cfg.workers);
        ordered_json c;
        c["rigorous"] = false;
        c["region_lo"] = cfg.contraction_region->lo;
        c["region_hi"] = cfg.contraction_region->hi;
        c["L_hat"] = est.L_hat;
        c["contractive"] = est.contractive;
        c["invariant"] = est.invariant;
        c["certified"] = est.certified;
        c["valid_samples"] = est.valid_samples;
        c["invalid_samples"] = est.invalid_samples;
        c["failures"] = est.failures;
        doc["results"]["contraction"] = c;
    }
    const fs::path dir = prepare_out_dir(cfg);
    write_json(dir / "fixpoint.json", doc);

    out << "fixpoint: x_star=" << bracket(rep.x_star, cfg.precision)
        << " spectral_radius=" << format_real(rep.spectral_radius, cfg.precision)
        << " classification=" << to_string(rep.classification) << " method=" << to_string(rep.method)
        << " iterations=" << rep.iterations << '\n';
}

void run_basin(const RunConfig& cfg, std::ostream& out) {
    if (!cfg.basin_bounds) throw ValidationError("basin requires basin.lo, basin.hi and basin.cells");
    const StroboscopicMap map = cfg.scenario.build_map(cfg.x0);
    const StateVector target = cfg.basin_target ? *cfg.basin_target : find_fixed_point(map, cfg.x0, cfg.fixpoint).x_star;
    const BasinGrid grid = basin_scan(map, BasinSpec{*cfg.basin_bounds, cfg.basin_resolution}, target, cfg.basin);

    const fs::path dir = prepare_out_dir(cfg);
    {
        std::ofstream os(dir / "basin.csv", std::ios::binary);
        if (!os) throw Error("cannot write " + (dir / "basin.csv").string());
        write_basin_csv(os, grid, cfg.precision);
    }
    ordered_json doc = report_header(cfg, "basin");
    ordered_json& res = doc["results"];
    res["grid_file"] = "basin.csv";
    res["target"] = to_json(target);
    res["cells"] = grid.cells.size();
    res["converged"] = grid.converged_count;
    res["invalid"] = grid.invalid_count;
    res["box_volume"] = grid.bounds.volume();
    res["measure"] = grid.measure;
    write_json(dir / "basin.json", doc);

    out << "basin: target=" << bracket(target, cfg.precision) << " cells=" << grid.cells.size()
        << " converged=" << grid.converged_count << " invalid=" << grid.invalid_count
        << " measure=" << format_real(grid.measure, cfg.precision) << '\n';
}

void run_sweep(const RunConfig& cfg, std::ostream& out) {
    if (cfg.sweep_param.empty() || cfg.sweep_values.empty()) {
        throw ValidationError("sweep requires sweep.param and sweep.values");
    }
    const Scenario& base = cfg.scenario;
    const auto family = [&](double v) { return base.with_parameter(cfg.sweep_param, v).build_map(cfg.x0); };
    const auto rows = parameter_sweep(family, cfg.sweep_values, cfg.x0, cfg.fixpoint, cfg.workers);

    const fs::path dir = prepare_out_dir(cfg);
    {
        std::ofstream os(dir / "sweep.csv", std::ios::binary);
        if (!os) throw Error("cannot write " + (dir / "sweep.csv").string());
        write_sweep_csv(os, rows, cfg.x0.dim(), cfg.precision);
    }
    ordered_json doc = report_header(cfg, "sweep");
    ordered_json table = ordered_json::array();
    std::size_t failures = 0;
    for (const auto& r : rows) {
        ordered_json row;
        row["value"] = r.value;
        row["x_star"] = r.x_star ? to_json(*r.x_star) : ordered_json();
        row["spectral_radius"] = r.spectral_radius ? ordered_json(*r.spectral_radius) : ordered_json();
        row["classification"] = r.classification ? ordered_json(to_string(*r.classification)) : ordered_json();
        row["error"] = r.error;
        if (!r.error.empty()) ++failures;
        table.push_back(row);
    }
    doc["results"]["table_file"] = "sweep.csv";
    doc["results"]["param"] = cfg.sweep_param;
    doc["results"]["rows"] = table;
    write_json(dir / "sweep.json", doc);

    out << "sweep: param=" << cfg.sweep_param << " rows=" << rows.size() << " failures=" << failures << '\n';
}

}  // namespace resetlab
