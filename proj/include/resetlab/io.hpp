#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "resetlab/reset.hpp"
#include "resetlab/stroboscopic.hpp"

namespace resetlab {

/// printf-style "%.{precision}g"; 17 significant digits round-trip doubles.
std::string format_real(double value, int precision = 17);

/// CSV with header `t,tag,x0,...,x{d-1}`, one row per sample in time order.
void write_trajectory_csv(std::ostream& os, const HybridTrajectory& traj, int precision = 17);
/// Parses write_trajectory_csv output; reset times are the left_limit times.
HybridTrajectory read_trajectory_csv(std::istream& is);

/// Cell centers with `converged,iterations,invalid`, in cell order.
void write_basin_csv(std::ostream& os, const BasinGrid& grid, int precision = 17);

/// `value,status,x_star0..,spectral_radius,classification`; failed rows have
/// status=error and empty numeric fields.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, std::size_t dim,
                     int precision = 17);

}  // namespace resetlab
