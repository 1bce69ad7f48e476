// SPDX-License-Identifier: Apache-2.0

#include "omimo/io.hpp"

#include "omimo/version.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace omimo {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double value = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw ConfigError(where + ": not a number: '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long long value = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw ConfigError(where + ": not an integer: '" + text + "'");
  }
  return value;
}

std::uint64_t parse_seed(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  char* end = nullptr;
  const unsigned long long value = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw ConfigError(where + ": not a seed value: '" + text + "'");
  }
  return value;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::vector<Interferer> parse_interferers(const std::string& text) {
  std::vector<Interferer> list;
  for (const std::string& part : split(text, ';')) {
    const std::string item = trim(part);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("interferers: expected angle_deg:power_db, got '" + item + "'");
    }
    list.push_back({parse_double(item.substr(0, colon), "interferers angle"),
                    parse_double(item.substr(colon + 1), "interferers power")});
  }
  return list;
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> list;
  for (const std::string& part : split(text, ',')) {
    const std::string item = trim(part);
    if (item.empty()) continue;
    list.push_back(Index(parse_integer(item, "k_list entry")));
  }
  return list;
}

ThetaGrid parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) {
    throw ConfigError("grid: expected min:max:step, got '" + text + "'");
  }
  ThetaGrid grid;
  grid.min_deg = parse_double(parts[0], "grid min");
  grid.max_deg = parse_double(parts[1], "grid max");
  grid.step_deg = parse_double(parts[2], "grid step");
  return grid;
}

std::string interferers_to_string(const std::vector<Interferer>& list) {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ";";
    out += format_number(list[i].angle_deg) + ":" + format_number(list[i].power_db);
  }
  return out;
}

std::string index_list_to_string(const std::vector<Index>& list) {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(list[i]);
  }
  return out;
}

std::string grid_to_string(const ThetaGrid& grid) {
  return format_number(grid.min_deg) + ":" + format_number(grid.max_deg) + ":" +
         format_number(grid.step_deg);
}

void apply_config_value(ScenarioConfig& config, const std::string& key,
                        const std::string& value, const std::string& where) {
  if (key == "mt") {
    config.num_tx = Index(parse_integer(value, where));
  } else if (key == "mr") {
    config.num_rx = Index(parse_integer(value, where));
  } else if (key == "nr") {
    config.num_comms_rx = Index(parse_integer(value, where));
  } else if (key == "dt") {
    config.tx_spacing = parse_double(value, where);
  } else if (key == "dr") {
    config.rx_spacing = parse_double(value, where);
  } else if (key == "theta_s_deg") {
    config.steer_deg = parse_double(value, where);
  } else if (key == "interferers") {
    config.interferers = parse_interferers(value);
  } else if (key == "k") {
    config.num_subarrays = Index(parse_integer(value, where));
  } else if (key == "k_list") {
    config.subarray_counts = parse_index_list(value);
  } else if (key == "snr_db") {
    config.snr_db = parse_double(value, where);
  } else if (key == "signal_power_db") {
    config.signal_power_db = parse_double(value, where);
  } else if (key == "trials") {
    config.trials = Index(parse_integer(value, where));
  } else if (key == "seed") {
    config.seed = parse_seed(value, where);
  } else if (key == "grid") {
    config.grid = parse_grid(value);
  } else if (key == "n_samples") {
    config.num_samples = Index(parse_integer(value, where));
  } else {
    throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

ScenarioConfig parse_config(std::istream& in, const std::string& origin) {
  ScenarioConfig config;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    const std::string where = origin + ":" + std::to_string(line_number);
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    apply_config_value(config, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)),
                       where);
  }
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse_config(in, path);
}

std::string serialize_config(const ScenarioConfig& config) {
  std::ostringstream out;
  out << "mt = " << config.num_tx << "\n";
  out << "mr = " << config.num_rx << "\n";
  out << "nr = " << config.num_comms_rx << "\n";
  out << "dt = " << format_number(config.tx_spacing) << "\n";
  out << "dr = " << format_number(config.rx_spacing) << "\n";
  out << "theta_s_deg = " << format_number(config.steer_deg) << "\n";
  out << "interferers = " << interferers_to_string(config.interferers) << "\n";
  out << "k = " << config.num_subarrays << "\n";
  out << "k_list = " << index_list_to_string(config.subarray_counts) << "\n";
  out << "snr_db = " << format_number(config.snr_db) << "\n";
  out << "signal_power_db = " << format_number(config.signal_power_db) << "\n";
  out << "trials = " << config.trials << "\n";
  out << "seed = " << config.seed << "\n";
  out << "grid = " << grid_to_string(config.grid) << "\n";
  out << "n_samples = " << config.num_samples << "\n";
  return out.str();
}

namespace {

// One complex literal of the form [+-]a[+-]bj, [+-]bj or [+-]a.
std::complex<double> parse_complex_literal(const std::string& token, const std::string& where) {
  const std::string t = trim(token);
  if (t.empty()) throw IoError(where + ": empty complex entry");
  const char* cursor = t.c_str();
  char* end = nullptr;
  const double first = std::strtod(cursor, &end);
  if (end == cursor) throw IoError(where + ": malformed complex entry '" + t + "'");
  if (*end == '\0') return {first, 0.0};
  if (*end == 'j' || *end == 'i') {
    if (end + 1 != t.c_str() + t.size()) {
      throw IoError(where + ": trailing characters in complex entry '" + t + "'");
    }
    return {0.0, first};
  }
  cursor = end;
  const double second = std::strtod(cursor, &end);
  if (end == cursor || (*end != 'j' && *end != 'i') || end + 1 != t.c_str() + t.size()) {
    throw IoError(where + ": malformed complex entry '" + t + "'");
  }
  return {first, second};
}

Eigen::MatrixXcd parse_paired_header_channel(const std::vector<std::string>& lines,
                                             const std::string& path) {
  if (lines.size() != 2) {
    throw IoError(path + ": paired-column channel files need a header line and one data row");
  }
  const auto header = split(lines[0], ',');
  Index rows = 0;
  Index cols = 0;
  struct Cell {
    Index r, c;
    bool imag;
  };
  std::vector<Cell> cells;
  for (const std::string& raw : header) {
    const std::string name = trim(raw);
    Index r = 0, c = 0;
    char kind[3] = {0, 0, 0};
    const bool matched = std::sscanf(name.c_str(), "h%td_%td_%2s", &r, &c, kind) == 3 &&
                         (std::string(kind) == "re" || std::string(kind) == "im") &&
                         name == "h" + std::to_string(r) + "_" + std::to_string(c) + "_" + kind;
    if (!matched) {
      throw IoError(path + ": unexpected channel header cell '" + name + "'");
    }
    cells.push_back({r, c, std::string(kind) == "im"});
    rows = std::max(rows, r + 1);
    cols = std::max(cols, c + 1);
  }
  const auto data = split(lines[1], ',');
  if (data.size() != cells.size()) {
    throw IoError(path + ": channel data row does not match the header");
  }
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(rows, cols);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> seen =
      Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>::Zero(rows, 2 * cols);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double value = 0;
    try {
      value = parse_double(data[i], path);
    } catch (const ConfigError& e) {
      throw IoError(e.what());
    }
    const Cell& cell = cells[i];
    if (cell.imag) {
      h(cell.r, cell.c).imag(value);
    } else {
      h(cell.r, cell.c).real(value);
    }
    seen(cell.r, cell.c + (cell.imag ? cols : 0)) += 1;
  }
  if ((seen.array() != 1).any()) {
    throw IoError(path + ": channel header must name every entry exactly once");
  }
  return h;
}

Eigen::MatrixXcd parse_block_channel(const std::vector<std::string>& lines,
                                     const std::string& path) {
  Index rows = 0, cols = 0;
  if (std::sscanf(lines[0].c_str(), "# complex-blocks %td %td", &rows, &cols) != 2 ||
      rows < 1 || cols < 1) {
    throw IoError(path + ": malformed '# complex-blocks <rows> <cols>' directive");
  }
  if (Index(lines.size()) != rows + 1) {
    throw IoError(path + ": block channel file must have exactly <rows> data lines");
  }
  Eigen::MatrixXcd h(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto items = split(lines[std::size_t(r) + 1], ',');
    if (Index(items.size()) != 2 * cols) {
      throw IoError(path + ": block channel row needs 2*cols values");
    }
    for (Index c = 0; c < cols; ++c) {
      try {
        h(r, c) = {parse_double(items[std::size_t(c)], path),
                   parse_double(items[std::size_t(c + cols)], path)};
      } catch (const ConfigError& e) {
        throw IoError(e.what());
      }
    }
  }
  return h;
}

Eigen::MatrixXcd parse_literal_channel(const std::vector<std::string>& lines,
                                       const std::string& path) {
  const Index rows = Index(lines.size());
  Index cols = -1;
  Eigen::MatrixXcd h;
  for (Index r = 0; r < rows; ++r) {
    const auto items = split(lines[std::size_t(r)], ',');
    if (cols < 0) {
      cols = Index(items.size());
      h.resize(rows, cols);
    } else if (Index(items.size()) != cols) {
      throw IoError(path + ": ragged complex-literal channel file");
    }
    for (Index c = 0; c < cols; ++c) {
      h(r, c) = parse_complex_literal(items[std::size_t(c)], path);
    }
  }
  return h;
}

}  // namespace

Eigen::MatrixXcd read_channel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open channel file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (!stripped.empty()) lines.push_back(stripped);
  }
  if (lines.empty()) throw IoError(path + ": empty channel file");

  if (lines[0].rfind("# complex-blocks", 0) == 0) return parse_block_channel(lines, path);
  if (lines[0].rfind("h0_0_re", 0) == 0) return parse_paired_header_channel(lines, path);
  if (lines[0].find('j') != std::string::npos || lines[0].find('i') != std::string::npos) {
    return parse_literal_channel(lines, path);
  }
  throw IoError(path + ": unrecognized channel CSV layout (see documented formats)");
}

void write_channel_csv(const std::string& path, const Eigen::MatrixXcd& channel) {
  auto out = open_output(path);
  for (Index r = 0; r < channel.rows(); ++r) {
    for (Index c = 0; c < channel.cols(); ++c) {
      if (r || c) out << ",";
      out << "h" << r << "_" << c << "_re,h" << r << "_" << c << "_im";
    }
  }
  out << "\n";
  for (Index r = 0; r < channel.rows(); ++r) {
    for (Index c = 0; c < channel.cols(); ++c) {
      if (r || c) out << ",";
      out << format_number(channel(r, c).real()) << "," << format_number(channel(r, c).imag());
    }
  }
  out << "\n";
  finish_output(out, path);
}

void write_beampattern_csv(const std::string& path, const BeampatternTable& table) {
  auto out = open_output(path);
  out << "theta_deg";
  for (const auto& column : table.columns) out << "," << column.label;
  out << "\n";
  for (Index i = 0; i < table.theta_deg.size(); ++i) {
    out << format_number(table.theta_deg(i));
    for (const auto& column : table.columns) out << "," << format_number(column.gain_db(i));
    out << "\n";
  }
  finish_output(out, path);
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  auto out = open_output(path);
  out << "label,peak_theta_deg,psl_db,mainlobe_width_deg,psl_improvement_db\n";
  for (const auto& row : rows) {
    out << row.label << "," << format_number(row.metrics.peak_theta_deg) << ","
        << format_number(row.metrics.psl_db) << ","
        << format_number(row.metrics.mainlobe_width_deg) << ","
        << format_number(row.psl_improvement_db) << "\n";
  }
  finish_output(out, path);
}

void write_sinr_csv(const std::string& path, const TrialStats& stats) {
  auto out = open_output(path);
  out << "trial,sinr_db,suppression_db\n";
  for (Index t = 0; t < stats.sinr_db.size(); ++t) {
    out << (t + 1) << "," << format_number(stats.sinr_db(t)) << ","
        << format_number(stats.suppression_db(t)) << "\n";
  }
  out << "mean," << format_number(stats.sinr.mean) << ","
      << format_number(stats.suppression.mean) << "\n";
  out << "median," << format_number(stats.sinr.median) << ","
      << format_number(stats.suppression.median) << "\n";
  out << "std," << format_number(stats.sinr.stddev) << ","
      << format_number(stats.suppression.stddev) << "\n";
  finish_output(out, path);
}

void write_ksweep_csv(const std::string& path, const std::vector<Index>& element_counts,
                      const std::vector<std::vector<ApertureSweepPoint>>& curves) {
  if (element_counts.size() != curves.size()) {
    throw std::invalid_argument("write_ksweep_csv: one curve per element count required");
  }
  auto out = open_output(path);
  out << "K";
  Index max_k = 0;
  for (std::size_t i = 0; i < element_counts.size(); ++i) {
    out << ",M_eps_MT" << element_counts[i];
    max_k = std::max(max_k, Index(curves[i].size()));
  }
  out << "\n";
  for (Index k = 1; k <= max_k; ++k) {
    out << k;
    for (const auto& curve : curves) {
      out << ",";
      if (k <= Index(curve.size())) out << curve[std::size_t(k - 1)].effective_aperture;
    }
    out << "\n";
  }
  finish_output(out, path);
}

void write_manifest(const std::string& path, const ScenarioConfig& config,
                    const std::string& command, const std::string& argv_line,
                    const std::vector<std::string>& outputs) {
  auto out = open_output(path);
  out << "# omimo run manifest\n";
  out << "# version = " << tool_version << "\n";
  out << "# command = " << command << "\n";
  if (!argv_line.empty()) out << "# argv = " << argv_line << "\n";
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
  out << "# created_utc = " << stamp << "\n";
  for (const auto& file : outputs) out << "# output = " << file << "\n";
  out << serialize_config(config);
  finish_output(out, path);
}

}  // namespace omimo
