#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>

#include "resetlab/config.hpp"

namespace resetlab {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInvalidInput = 1,      // parse or validation failure
    kExitNumericalFailure = 2,  // NoConvergence, DomainError, ...
};

int exit_code_for(const std::exception& e) noexcept;

void run_models(std::ostream& out);

/// Writes trajectory.csv and simulate.json into `cfg.out_dir`; prints one
/// summary line.
void run_simulate(const RunConfig& cfg, std::ostream& out);
/// Writes fixpoint.json (with a contraction estimate when a region is set).
void run_fixpoint(const RunConfig& cfg, std::ostream& out);
/// Writes basin.csv and basin.json.
void run_basin(const RunConfig& cfg, std::ostream& out);
/// Writes sweep.csv and sweep.json.
void run_sweep(const RunConfig& cfg, std::ostream& out);

}  // namespace resetlab
