#include "resetlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "resetlab/errors.hpp"
#include "resetlab/io.hpp"

namespace resetlab {

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "model",
        "reset",
        "gamma",
        "T",
        "matrix",
        "c",
        "N0",
        "strict",
        "x0",
        "t0",
        "horizon",
        "samples_per_period",
        "stabilized_tol",
        "integrator.method",
        "integrator.h",
        "integrator.rel_tol",
        "integrator.abs_tol",
        "integrator.max_step",
        "tol",
        "max_iter",
        "method",
        "basin.lo",
        "basin.hi",
        "basin.cells",
        "basin.tol",
        "basin.max_iter",
        "basin.target",
        "contraction.lo",
        "contraction.hi",
        "contraction.samples",
        "sweep.param",
        "sweep.values",
        "workers",
        "precision",
        "out",
    };
    return keys;
}

namespace {

constexpr std::string_view kParamPrefix = "param.";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool known_key(const std::string& key) {
    if (key.rfind(kParamPrefix, 0) == 0) return key.size() > kParamPrefix.size();
    const auto& keys = config_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

struct RawEntry {
    std::string value;
    std::size_t line;  // 0 for command-line overrides
};

using RawMap = std::map<std::string, RawEntry>;

void add_entry(RawMap& raw, std::string_view line_text, std::size_t line, bool allow_replace) {
    const auto eq = line_text.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line);
    const std::string key(trim(line_text.substr(0, eq)));
    const std::string value(trim(line_text.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", line);
    if (!known_key(key)) {
        std::string msg = "unknown key; accepted keys: param.<name>";
        for (const auto& k : config_keys()) msg += " " + k;
        throw ParseError(msg, line, key);
    }
    if (!allow_replace && raw.contains(key)) throw ParseError("duplicate key", line, key);
    raw[key] = RawEntry{value, line};
}

class Reader {
public:
    explicit Reader(const RawMap& raw) : raw_(raw) {}

    bool has(const std::string& key) const { return raw_.contains(key); }

    std::string text(const std::string& key, const std::string& fallback) {
        auto it = raw_.find(key);
        std::string v = it == raw_.end() ? fallback : it->second.value;
        echo_[key] = v;
        return v;
    }

    double real(const std::string& key, double fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) {
            echo_[key] = format_real(fallback);
            return fallback;
        }
        const double v = parse_real(it->second.value, it->second.line, key);
        echo_[key] = format_real(v);
        return v;
    }

    std::optional<double> optional_real(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return real(key, 0.0);
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) {
            echo_[key] = std::to_string(fallback);
            return fallback;
        }
        const std::size_t v = parse_count(it->second.value, it->second.line, key);
        echo_[key] = std::to_string(v);
        return v;
    }

    bool boolean(const std::string& key, bool fallback) {
        auto it = raw_.find(key);
        bool v = fallback;
        if (it != raw_.end()) {
            const std::string& s = it->second.value;
            if (s == "true" || s == "1" || s == "yes") {
                v = true;
            } else if (s == "false" || s == "0" || s == "no") {
                v = false;
            } else {
                throw ParseError("expected true or false, got '" + s + "'", it->second.line, key);
            }
        }
        echo_[key] = v ? "true" : "false";
        return v;
    }

    std::vector<double> reals(const std::string& key) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return {};
        std::vector<double> out;
        for (const auto& item : split(it->second.value, it->second.line, key)) {
            out.push_back(parse_real(item, it->second.line, key));
        }
        echo_[key] = join(out);
        return out;
    }

    std::vector<std::size_t> counts(const std::string& key) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return {};
        std::vector<std::size_t> out;
        std::string echo;
        for (const auto& item : split(it->second.value, it->second.line, key)) {
            out.push_back(parse_count(item, it->second.line, key));
            echo += (echo.empty() ? "" : ",") + std::to_string(out.back());
        }
        echo_[key] = echo;
        return out;
    }

    std::map<std::string, std::string> echo() const { return echo_; }

    static std::string join(const std::vector<double>& values) {
        std::string s;
        for (double v : values) s += (s.empty() ? "" : ",") + format_real(v);
        return s;
    }

private:
    static double parse_real(std::string_view s, std::size_t line, const std::string& key) {
        s = trim(s);
        double v = 0.0;
        const char* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
            throw ParseError("expected a finite real number, got '" + std::string(s) + "'", line, key);
        }
        return v;
    }

    static std::size_t parse_count(std::string_view s, std::size_t line, const std::string& key) {
        s = trim(s);
        std::size_t v = 0;
        const char* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (s.empty() || ec != std::errc() || ptr != end) {
            throw ParseError("expected a non-negative integer, got '" + std::string(s) + "'", line, key);
        }
        return v;
    }

    static std::vector<std::string> split(const std::string& value, std::size_t line, const std::string& key) {
        std::vector<std::string> items;
        std::string_view rest = value;
        while (true) {
            const auto comma = rest.find(',');
            const auto item = trim(rest.substr(0, comma));
            if (item.empty()) throw ParseError("empty list element", line, key);
            items.emplace_back(item);
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return items;
    }

    const RawMap& raw_;
    std::map<std::string, std::string> echo_;
};

IntegrationMethod integration_method_from_string(const std::string& s) {
    if (s == "adaptive" || s == "adaptive_embedded") return IntegrationMethod::adaptive_embedded;
    if (s == "rk4" || s == "fixed_rk4") return IntegrationMethod::fixed_rk4;
    throw ValidationError("integrator.method must be 'adaptive' or 'rk4', got '" + s + "'");
}

std::optional<Box> read_box(Reader& r, const std::string& prefix, std::size_t dim) {
    std::vector<double> lo = r.reals(prefix + ".lo");
    std::vector<double> hi = r.reals(prefix + ".hi");
    if (lo.empty() && hi.empty()) return std::nullopt;
    if (lo.size() != dim || hi.size() != dim) {
        throw ValidationError(prefix + ".lo and " + prefix + ".hi need " + std::to_string(dim) + " values each");
    }
    Box box{std::move(lo), std::move(hi)};
    box.validate();
    return box;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
    RawMap raw;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) add_entry(raw, line, line_no, false);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    for (const auto& o : overrides) add_entry(raw, o, 0, true);

    Reader r(raw);
    RunConfig cfg;
    Scenario& sc = cfg.scenario;

    sc.model = r.text("model", "logistic");
    for (const auto& [key, entry] : raw) {
        if (key.rfind(kParamPrefix, 0) == 0) sc.params[key.substr(kParamPrefix.size())] = r.real(key, 0.0);
    }
    const ModelSpec model = sc.build_model();
    // Echo effective model parameters, defaults included.
    for (const auto& [k, v] : model.params()) {
        if (!raw.contains(std::string(kParamPrefix) + k)) r.real(std::string(kParamPrefix) + k, v);
    }

    if (!raw.contains("x0")) throw ValidationError("x0 is required");
    const std::vector<double> x0 = r.reals("x0");
    if (x0.size() != model.dim()) {
        throw ValidationError("x0 has " + std::to_string(x0.size()) + " values but model '" + sc.model +
                              "' has dimension " + std::to_string(model.dim()));
    }
    cfg.x0 = StateVector(x0);
    model.domain().check(cfg.x0.values());

    ResetSpec& rs = sc.reset;
    rs.kind = reset_kind_from_string(r.text("reset", "scalar_scale"));
    rs.period = r.real("T", 1.0);
    rs.policy = r.boolean("strict", false) ? NegativePolicy::error : NegativePolicy::warn;
    switch (rs.kind) {
        case ResetKind::scalar_scale: rs.gamma = r.real("gamma", 0.67); break;
        case ResetKind::linear_map:
            if (!raw.contains("matrix")) throw ValidationError("linear_map reset requires 'matrix'");
            rs.matrix = r.reals("matrix");
            break;
        case ResetKind::replenishment:
            rs.fractions = r.reals("c");
            rs.total = r.optional_real("N0");
            break;
    }
    for (const char* key : {"gamma", "matrix", "c", "N0"}) {
        if (raw.contains(key) && !r.echo().contains(key)) {
            throw ValidationError(std::string("'") + key + "' does not apply to reset kind " + to_string(rs.kind));
        }
    }

    IntegratorConfig& ic = sc.integrator;
    ic.method = integration_method_from_string(r.text("integrator.method", "adaptive"));
    ic.h = r.real("integrator.h", ic.h);
    ic.rel_tol = r.real("integrator.rel_tol", ic.rel_tol);
    ic.abs_tol = r.real("integrator.abs_tol", ic.abs_tol);
    ic.max_step = r.real("integrator.max_step", ic.max_step);
    ic.validate();

    // Building the map validates the reset against the model.
    const StroboscopicMap map = sc.build_map(cfg.x0);

    cfg.t0 = r.real("t0", 0.0);
    cfg.horizon = r.real("horizon", 30.0);
    if (!(cfg.horizon >= rs.period)) throw ValidationError("horizon must cover at least one period T");
    cfg.samples_per_period = r.count("samples_per_period", 100);
    if (cfg.samples_per_period < 1) throw ValidationError("samples_per_period must be >= 1");
    cfg.stabilized_tol = r.real("stabilized_tol", 1e-8);
    if (!(cfg.stabilized_tol > 0.0)) throw ValidationError("stabilized_tol must be > 0");

    cfg.fixpoint.tol = r.real("tol", 1e-10);
    if (!(cfg.fixpoint.tol > 0.0)) throw ValidationError("tol must be > 0");
    cfg.fixpoint.max_iter = r.count("max_iter", 1000);
    if (cfg.fixpoint.max_iter < 1) throw ValidationError("max_iter must be >= 1");
    cfg.fixpoint.method = fixed_point_method_from_string(r.text("method", "auto"));

    const std::size_t d = model.dim();
    cfg.basin_bounds = read_box(r, "basin", d);
    cfg.basin_resolution = r.counts("basin.cells");
    if (cfg.basin_bounds) {
        if (cfg.basin_resolution.size() == 1 && d > 1) cfg.basin_resolution.assign(d, cfg.basin_resolution[0]);
        if (cfg.basin_resolution.size() != d) throw ValidationError("basin.cells needs 1 or " + std::to_string(d) + " values");
        for (auto n : cfg.basin_resolution) {
            if (n < 1) throw ValidationError("basin.cells must be >= 1");
        }
    } else if (!cfg.basin_resolution.empty()) {
        throw ValidationError("basin.cells given without basin.lo/basin.hi");
    }
    cfg.basin.tol = r.real("basin.tol", 1e-8);
    if (!(cfg.basin.tol > 0.0)) throw ValidationError("basin.tol must be > 0");
    cfg.basin.max_iter = r.count("basin.max_iter", 500);
    if (raw.contains("basin.target")) {
        auto target = r.reals("basin.target");
        if (target.size() != d) throw ValidationError("basin.target needs " + std::to_string(d) + " values");
        cfg.basin_target = StateVector(std::move(target));
    }

    cfg.contraction_region = read_box(r, "contraction", d);
    cfg.contraction_samples = r.count("contraction.samples", 50);
    if (cfg.contraction_samples < 1) throw ValidationError("contraction.samples must be >= 1");

    cfg.sweep_param = r.text("sweep.param", "");
    cfg.sweep_values = r.reals("sweep.values");
    if (!cfg.sweep_param.empty()) {
        const bool reset_param = cfg.sweep_param == "gamma" || cfg.sweep_param == "T" || cfg.sweep_param == "N0";
        if (!reset_param && !model.params().contains(cfg.sweep_param)) {
            throw ValidationError("sweep.param '" + cfg.sweep_param + "' is neither gamma, T, N0 nor a parameter of model '" +
                                  sc.model + "'");
        }
    }

    const std::size_t workers = r.count("workers", 0);
    if (workers > 1024) throw ValidationError("workers must be <= 1024");
    cfg.workers = static_cast<unsigned>(workers);
    cfg.basin.workers = cfg.workers;
    const std::size_t precision = r.count("precision", 17);
    if (precision < 1 || precision > 17) throw ValidationError("precision must lie in [1, 17]");
    cfg.precision = static_cast<int>(precision);
    cfg.out_dir = r.text("out", ".");

    cfg.entries = r.echo();
    return cfg;
}

}  // namespace resetlab
