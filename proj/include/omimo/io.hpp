// SPDX-License-Identifier: Apache-2.0
//
// Flat key=value configuration files, CSV emission, complex channel CSV
// parsing and the run manifest.

#ifndef OMIMO_IO_HPP
#define OMIMO_IO_HPP

#include "omimo/scenario.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace omimo {

// Invalid configuration content or values (CLI exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable/unwritable files or malformed data files (CLI exit code 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All numeric CSV output uses 12 significant digits.
std::string format_number(double value);

// --- configuration ---------------------------------------------------------
//
// Text format: one `key = value` per line, `#` comments, blank lines ignored.
// Keys: mt, mr, nr, dt, dr, theta_s_deg, interferers, k, k_list, snr_db,
// signal_power_db, trials, seed, grid, n_samples.
//   interferers: "angle_deg:power_db;angle_deg:power_db;..." (empty = none)
//   k_list:      "1,5,10,20"
//   grid:        "min_deg:max_deg:step_deg"

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(std::istream& in, const std::string& origin);
void apply_config_value(ScenarioConfig& config, const std::string& key,
                        const std::string& value, const std::string& where);
std::string serialize_config(const ScenarioConfig& config);

std::vector<Interferer> parse_interferers(const std::string& text);
std::vector<Index> parse_index_list(const std::string& text);
ThetaGrid parse_grid(const std::string& text);
std::string interferers_to_string(const std::vector<Interferer>& list);
std::string index_list_to_string(const std::vector<Index>& list);
std::string grid_to_string(const ThetaGrid& grid);

// --- channel matrices ------------------------------------------------------
//
// Three accepted CSV layouts, auto-detected from the first line:
//  (a) paired columns: header `h<r>_<c>_re,h<r>_<c>_im,...` naming every
//      entry, followed by one data row (this is what write_channel_csv emits);
//  (b) block layout: a `# complex-blocks <rows> <cols>` directive followed by
//      <rows> lines of 2*<cols> numbers, real block then imaginary block;
//  (c) complex literals: <rows> lines of <cols> tokens like `0.5-0.25j`.

Eigen::MatrixXcd read_channel_csv(const std::string& path);
void write_channel_csv(const std::string& path, const Eigen::MatrixXcd& channel);

// --- result files ----------------------------------------------------------

void write_beampattern_csv(const std::string& path, const BeampatternTable& table);

struct MetricsRow {
  std::string label;
  SidelobeMetrics metrics;
  double psl_improvement_db{0};  // versus the unprojected widest-K column
};

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);
void write_sinr_csv(const std::string& path, const TrialStats& stats);
void write_ksweep_csv(const std::string& path, const std::vector<Index>& element_counts,
                      const std::vector<std::vector<ApertureSweepPoint>>& curves);

// The manifest records the resolved configuration (loadable as a config file;
// `#` lines carry version, command, timestamp and the output list), so a run
// can be reproduced bit-identically from it.
void write_manifest(const std::string& path, const ScenarioConfig& config,
                    const std::string& command, const std::string& argv_line,
                    const std::vector<std::string>& outputs);

}  // namespace omimo

#endif  // OMIMO_IO_HPP
