#pragma once

// Trajectory export: CSV samples, a JSON metadata sidecar with a SHA-256 of
// the CSV, and two-column plot data.

#include <filesystem>
#include <string>

#include "cal/dynamics.hpp"

namespace cal {

/// printf("%.17g"); round-trips every finite double.
std::string format_double(double x);

/// Header "t,q_1..q_n,dq_1..,d2q_1..,d3q_1.." followed by one row per sample.
std::string trajectory_csv(const Trajectory& traj);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

/// Writes `<stem>.csv` and `<stem>.meta.json` into `dir`; returns the CSV checksum.
std::string write_trajectory(const std::filesystem::path& dir, const std::string& stem,
                             const Trajectory& traj);

/// Writes `<stem>_q<j>.dat` ("t value" per line) for every coordinate j.
void write_plot_data(const std::filesystem::path& dir, const std::string& stem,
                     const Trajectory& traj);

/// Writes text to a file, throwing cal::Error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cal
