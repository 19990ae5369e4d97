#include "resetlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "resetlab/errors.hpp"

namespace resetlab {

std::string format_real(double value, int precision) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    return std::string(buf, static_cast<std::size_t>(n));
}

void write_trajectory_csv(std::ostream& os, const HybridTrajectory& traj, int precision) {
    const std::size_t d = traj.dim();
    os << "t,tag";
    for (std::size_t i = 0; i < d; ++i) os << ",x" << i;
    os << '\n';
    for (const auto& s : traj.samples) {
        os << format_real(s.t, precision) << ',' << to_string(s.tag);
        for (double v : s.state) os << ',' << format_real(v, precision);
        os << '\n';
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_field(const std::string& s, std::size_t line) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) throw ParseError("bad number '" + s + "'", line);
    return v;
}

}  // namespace

HybridTrajectory read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty trajectory file", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "t" || header[1] != "tag") {
        throw ParseError("trajectory header must start with t,tag,x0", 1);
    }
    const std::size_t d = header.size() - 2;
    for (std::size_t i = 0; i < d; ++i) {
        if (header[i + 2] != "x" + std::to_string(i)) throw ParseError("unexpected column '" + header[i + 2] + "'", 1);
    }

    HybridTrajectory traj;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != d + 2) throw ParseError("expected " + std::to_string(d + 2) + " fields", line_no);
        const double t = parse_field(fields[0], line_no);
        SampleTag tag;
        try {
            tag = sample_tag_from_string(fields[1]);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line_no);
        }
        std::vector<double> x;
        x.reserve(d);
        for (std::size_t i = 0; i < d; ++i) x.push_back(parse_field(fields[i + 2], line_no));
        traj.samples.push_back({t, StateVector(std::move(x)), tag});
        if (tag == SampleTag::left_limit) traj.reset_times.push_back(t);
    }
    return traj;
}

void write_basin_csv(std::ostream& os, const BasinGrid& grid, int precision) {
    const std::size_t d = grid.bounds.dim();
    for (std::size_t i = 0; i < d; ++i) os << 'x' << i << ',';
    os << "converged,iterations,invalid\n";
    for (const auto& c : grid.cells) {
        for (double v : c.center) os << format_real(v, precision) << ',';
        os << (c.converged ? 1 : 0) << ',' << c.iterations << ',' << (c.invalid ? 1 : 0) << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, std::size_t dim, int precision) {
    os << "value,status";
    for (std::size_t i = 0; i < dim; ++i) os << ",x_star" << i;
    os << ",spectral_radius,classification\n";
    for (const auto& r : rows) {
        os << format_real(r.value, precision) << ',' << (r.error.empty() ? "ok" : "error");
        for (std::size_t i = 0; i < dim; ++i) {
            os << ',';
            if (r.x_star) os << format_real((*r.x_star)[i], precision);
        }
        os << ',';
        if (r.spectral_radius) os << format_real(*r.spectral_radius, precision);
        os << ',';
        if (r.classification) os << to_string(*r.classification);
        os << '\n';
    }
}

}  // namespace resetlab
