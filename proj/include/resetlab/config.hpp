#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "resetlab/scenario.hpp"
#include "resetlab/state.hpp"
#include "resetlab/stroboscopic.hpp"

namespace resetlab {

/// A fully validated run description.
///
/// Configuration text is one `key = value` pair per line; `#` starts a
/// comment, lists are comma separated. Unknown or repeated keys are errors.
struct RunConfig {
    Scenario scenario;
    StateVector x0{0.5};
    double t0 = 0.0;
    double horizon = 30.0;
    std::size_t samples_per_period = 100;
    double stabilized_tol = 1e-8;

    FixedPointOptions fixpoint;

    std::optional<Box> basin_bounds;
    std::vector<std::size_t> basin_resolution;
    BasinOptions basin;
    std::optional<StateVector> basin_target;

    std::optional<Box> contraction_region;
    std::size_t contraction_samples = 50;

    std::string sweep_param;
    std::vector<double> sweep_values;

    unsigned workers = 0;
    int precision = 17;
    std::string out_dir = ".";

    /// Every key with its effective value (defaults included), sorted by key.
    std::map<std::string, std::string> entries;
};

/// Keys accepted by parse_config besides the `param.<name>` family.
const std::vector<std::string>& config_keys();

/// Parses and validates configuration text. Each override is "key=value" and
/// replaces (or adds) the key. Throws ParseError for syntax, unknown keys and
/// malformed numbers; ValidationError for out-of-range or inconsistent values.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

}  // namespace resetlab
