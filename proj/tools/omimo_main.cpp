// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: beampattern, ksweep, sinr and nsp-check subcommands
// emitting CSV result files plus a reproducible run manifest.

#include "omimo/io.hpp"
#include "omimo/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace omimo;

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_tolerance = 2;
constexpr int exit_io = 3;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  std::optional<long long> mt, mr, nr, k, trials, n_samples;
  std::optional<double> dt, dr, theta_s_deg, snr_db, signal_power_db;
  std::optional<std::string> interferers, k_list, grid;
  std::optional<unsigned long long> seed;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts, bool with_config) {
  if (with_config) {
    cmd->add_option("config", opts.config_path, "Config file (key = value lines)")
        ->check(CLI::ExistingFile);
  }
  cmd->add_option("--out", opts.out_dir,
                  "Output directory (default: $OMIMO_OUT_DIR or current directory)");
  cmd->add_option("--threads", opts.threads, "Worker threads (results are thread-count invariant)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mt", opts.mt, "Radar transmit elements");
  cmd->add_option("--mr", opts.mr, "Radar receive elements");
  cmd->add_option("--nr", opts.nr, "Communications receive antennas");
  cmd->add_option("--dt", opts.dt, "Transmit spacing in wavelengths");
  cmd->add_option("--dr", opts.dr, "Receive spacing in wavelengths");
  cmd->add_option("--theta-s-deg", opts.theta_s_deg, "Steering direction in degrees");
  cmd->add_option("--interferers", opts.interferers, "angle_deg:power_db;... ('' for none)");
  cmd->add_option("--k", opts.k, "Subarray count for the SINR engine");
  cmd->add_option("--k-list", opts.k_list, "Comma-separated subarray counts for sweeps");
  cmd->add_option("--snr-db", opts.snr_db, "Per-element SNR of a 0 dB target return");
  cmd->add_option("--signal-power-db", opts.signal_power_db, "Target reflection power");
  cmd->add_option("--trials", opts.trials, "Monte-Carlo trials");
  cmd->add_option("--seed", opts.seed, "RNG seed");
  cmd->add_option("--grid", opts.grid, "Angle grid min:max:step in degrees");
  cmd->add_option("--n-samples", opts.n_samples, "Waveform samples per pulse");
}

ScenarioConfig resolve_config(const CommonOptions& opts) {
  ScenarioConfig config =
      opts.config_path.empty() ? ScenarioConfig{} : load_config(opts.config_path);
  const std::string where = "command line";
  if (opts.mt) config.num_tx = Index(*opts.mt);
  if (opts.mr) config.num_rx = Index(*opts.mr);
  if (opts.nr) config.num_comms_rx = Index(*opts.nr);
  if (opts.dt) config.tx_spacing = *opts.dt;
  if (opts.dr) config.rx_spacing = *opts.dr;
  if (opts.theta_s_deg) config.steer_deg = *opts.theta_s_deg;
  if (opts.interferers) config.interferers = parse_interferers(*opts.interferers);
  if (opts.k) config.num_subarrays = Index(*opts.k);
  if (opts.k_list) config.subarray_counts = parse_index_list(*opts.k_list);
  if (opts.snr_db) config.snr_db = *opts.snr_db;
  if (opts.signal_power_db) config.signal_power_db = *opts.signal_power_db;
  if (opts.trials) config.trials = Index(*opts.trials);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.grid) config.grid = parse_grid(*opts.grid);
  if (opts.n_samples) config.num_samples = Index(*opts.n_samples);
  config.validate();
  return config;
}

std::filesystem::path resolve_out_dir(const CommonOptions& opts) {
  std::string dir = opts.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("OMIMO_OUT_DIR")) dir = env;
  }
  if (dir.empty()) dir = ".";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
  return dir;
}

std::string join_argv(int argc, char** argv) {
  std::string line;
  for (int i = 0; i < argc; ++i) {
    if (i) line += " ";
    line += argv[i];
  }
  return line;
}

// Sidelobe metrics per column, with the improvement measured against the
// unprojected column with the largest subarray count (the closest thing to a
// conventional MIMO baseline in the sweep).
std::vector<MetricsRow> build_metrics(const BeampatternTable& table,
                                      const std::vector<Index>& subarray_counts) {
  std::vector<MetricsRow> rows;
  for (const auto& column : table.columns) {
    MetricsRow row;
    row.label = column.label;
    row.metrics = sidelobe_metrics(table.theta_deg, column.gain_db);
    rows.push_back(row);
  }
  Index max_k = 0;
  for (Index k : subarray_counts) max_k = std::max(max_k, k);
  const std::string baseline_label = "gain_db_K" + std::to_string(max_k);
  double baseline_psl = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    if (row.label == baseline_label && row.metrics.psl_defined) {
      baseline_psl = row.metrics.psl_db;
    }
  }
  for (auto& row : rows) {
    row.psl_improvement_db =
        row.metrics.psl_defined ? baseline_psl - row.metrics.psl_db
                                : std::numeric_limits<double>::quiet_NaN();
  }
  return rows;
}

int cmd_beampattern(const CommonOptions& opts, bool use_nsp, const std::string& channel_path,
                    const std::string& argv_line) {
  const ScenarioConfig config = resolve_config(opts);
  const auto out_dir = resolve_out_dir(opts);

  BeampatternTable table;
  if (use_nsp) {
    Eigen::MatrixXcd channel;
    if (!channel_path.empty()) {
      channel = read_channel_csv(channel_path);
      if (channel.cols() != config.num_tx) {
        throw ConfigError("channel file has " + std::to_string(channel.rows()) + "x" +
                          std::to_string(channel.cols()) + " entries but mt = " +
                          std::to_string(config.num_tx));
      }
    } else {
      RandomStream rng(config.seed, 0);  // stream 0: the sweep's channel draw
      channel = sample_channel(config.num_comms_rx, config.num_tx, rng);
    }
    const auto feas = nsp_feasibility(config.num_tx, channel.rows(), config.num_subarrays);
    if (!feas.feasible) {
      throw ConfigError("null-space projection infeasible: needs mt > nr, got mt = " +
                        std::to_string(config.num_tx) + ", nr = " +
                        std::to_string(channel.rows()));
    }
    table = beampattern_sweep_nsp(config, null_space_projection(channel), opts.threads);
  } else {
    table = beampattern_sweep(config, opts.threads);
  }

  const auto metrics = build_metrics(table, config.subarray_counts);
  const std::string pattern_file = (out_dir / "beampattern.csv").string();
  const std::string metrics_file = (out_dir / "metrics.csv").string();
  write_beampattern_csv(pattern_file, table);
  write_metrics_csv(metrics_file, metrics);
  write_manifest((out_dir / "manifest.txt").string(), config, "beampattern", argv_line,
                 {"beampattern.csv", "metrics.csv"});

  for (const auto& row : metrics) {
    if (row.metrics.psl_defined) {
      std::printf("%s: peak %.1f deg, PSL %.2f dB, mainlobe %.1f deg, improvement %+.2f dB\n",
                  row.label.c_str(), row.metrics.peak_theta_deg, row.metrics.psl_db,
                  row.metrics.mainlobe_width_deg, row.psl_improvement_db);
    } else {
      std::printf("%s: flat pattern, sidelobe level undefined\n", row.label.c_str());
    }
  }
  std::printf("wrote %s, %s\n", pattern_file.c_str(), metrics_file.c_str());
  return exit_ok;
}

int cmd_ksweep(const std::string& mt_list, const CommonOptions& opts,
               const std::string& argv_line) {
  const std::vector<Index> counts = parse_index_list(mt_list);
  if (counts.empty()) throw ConfigError("--mt needs at least one element count");
  const auto out_dir = resolve_out_dir(opts);

  std::vector<std::vector<ApertureSweepPoint>> curves;
  for (Index mt : counts) {
    curves.push_back(k_sweep(mt));
    const auto argmax = k_sweep_argmax(mt);
    const Index best = effective_aperture(mt, argmax.front());
    std::printf("mt=%td: max M_eps=%td at K in {%s}\n", mt, best,
                index_list_to_string(argmax).c_str());
  }
  const std::string sweep_file = (out_dir / "ksweep.csv").string();
  write_ksweep_csv(sweep_file, counts, curves);
  ScenarioConfig config;  // sweep is parameterized by argv alone; record defaults
  write_manifest((out_dir / "manifest.txt").string(), config, "ksweep", argv_line,
                 {"ksweep.csv"});
  std::printf("wrote %s\n", sweep_file.c_str());
  return exit_ok;
}

int cmd_sinr(const CommonOptions& opts, const std::string& argv_line) {
  const ScenarioConfig config = resolve_config(opts);
  const auto out_dir = resolve_out_dir(opts);
  const TrialStats stats = output_sinr(config, opts.threads);
  const std::string trials_file = (out_dir / "sinr_trials.csv").string();
  write_sinr_csv(trials_file, stats);
  write_manifest((out_dir / "manifest.txt").string(), config, "sinr", argv_line,
                 {"sinr_trials.csv"});
  std::printf("SINR over %td trials: mean %.2f dB, median %.2f dB, std %.2f dB\n",
              config.trials, stats.sinr.mean, stats.sinr.median, stats.sinr.stddev);
  std::printf("suppression: mean %.2f dB, median %.2f dB\n", stats.suppression.mean,
              stats.suppression.median);
  std::printf("wrote %s\n", trials_file.c_str());
  return exit_ok;
}

int cmd_nsp_check(const std::string& channel_path, const std::string& random_shape,
                  std::uint64_t seed, double tol, Index subarray_count) {
  Eigen::MatrixXcd channel;
  if (!channel_path.empty()) {
    channel = read_channel_csv(channel_path);
  } else {
    Index rows = 0, cols = 0;
    if (std::sscanf(random_shape.c_str(), "%tdx%td", &rows, &cols) != 2 || rows < 1 || cols < 1) {
      throw ConfigError("--random expects a shape like 4x20");
    }
    RandomStream rng(seed, 0);
    channel = sample_channel(rows, cols, rng);
  }

  const auto proj = null_space_projection(channel, tol);
  const double channel_norm = channel.norm();
  const double hp_rel = (channel * proj.p).norm() / std::max(1.0, channel_norm);
  const double idem = (proj.p * proj.p - proj.p).norm();
  const double herm = (proj.p - proj.p.adjoint()).norm() / std::max(1.0, proj.p.norm());
  const auto feas = nsp_feasibility(channel.cols(), channel.rows(), subarray_count);

  constexpr double residual_tol = 1e-10;
  const bool ok = hp_rel <= residual_tol && idem <= residual_tol && herm <= residual_tol;

  std::printf("channel: %td x %td, ||H||_F = %s\n", channel.rows(), channel.cols(),
              format_number(channel_norm).c_str());
  std::printf("numerical rank(H) = %td (tol %s relative)\n", proj.spectrum.numerical_rank,
              format_number(tol).c_str());
  std::printf("rank(P) = %td, null-space dim = %td\n", proj.rank,
              Index(channel.cols()) - proj.spectrum.numerical_rank);
  std::printf("||H P||_F / max(1, ||H||_F) = %s  [tol %g] %s\n", format_number(hp_rel).c_str(),
              residual_tol, hp_rel <= residual_tol ? "ok" : "VIOLATED");
  std::printf("||P^2 - P||_F = %s  [tol %g] %s\n", format_number(idem).c_str(), residual_tol,
              idem <= residual_tol ? "ok" : "VIOLATED");
  std::printf("||P - P^H||_F / max(1, ||P||_F) = %s  [tol %g] %s\n", format_number(herm).c_str(),
              residual_tol, herm <= residual_tol ? "ok" : "VIOLATED");
  std::printf("feasibility (mt > nr): %s, margin %td, M_eps(K=%td) = %td\n",
              feas.feasible ? "yes" : "no", feas.margin, subarray_count,
              feas.effective_aperture);
  return ok ? exit_ok : exit_tolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overlapped-MIMO radar beampatterns and null-space-projection spectrum sharing"};
  app.set_version_flag("--version", omimo::tool_version);
  app.require_subcommand(1);

  CommonOptions bp_opts;
  bool bp_nsp = false;
  std::string bp_channel;
  CLI::App* bp = app.add_subcommand("beampattern", "Beampattern sweep over the configured K list");
  add_common_options(bp, bp_opts, true);
  bp->add_flag("--nsp", bp_nsp, "Also emit null-space-projected columns");
  bp->add_option("--channel", bp_channel, "Channel CSV for --nsp (default: drawn from seed)")
      ->check(CLI::ExistingFile);

  std::string ks_mt = "10,15,20";
  CommonOptions ks_opts;
  CLI::App* ks = app.add_subcommand("ksweep", "Effective aperture versus subarray count");
  ks->add_option("--mt", ks_mt, "Comma-separated transmit element counts");
  ks->add_option("--out", ks_opts.out_dir, "Output directory");

  CommonOptions sinr_opts;
  CLI::App* sr = app.add_subcommand("sinr", "Monte-Carlo output SINR and suppression trials");
  add_common_options(sr, sinr_opts, true);

  std::string nc_channel, nc_random = "4x20";
  std::uint64_t nc_seed = 1;
  double nc_tol = 1e-12;
  long long nc_k = 5;
  CLI::App* nc = app.add_subcommand("nsp-check", "Verify projector properties for a channel");
  nc->add_option("--channel", nc_channel, "Channel CSV file")->check(CLI::ExistingFile);
  nc->add_option("--random", nc_random, "Random channel shape NRxMT (used without --channel)");
  nc->add_option("--seed", nc_seed, "Seed for the random channel");
  nc->add_option("--tol", nc_tol, "Relative rank tolerance")->check(CLI::PositiveNumber);
  nc->add_option("--k", nc_k, "Subarray count for the aperture diagnostic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_validation;
  }

  const std::string argv_line = join_argv(argc, argv);
  try {
    if (bp->parsed()) return cmd_beampattern(bp_opts, bp_nsp, bp_channel, argv_line);
    if (ks->parsed()) return cmd_ksweep(ks_mt, ks_opts, argv_line);
    if (sr->parsed()) return cmd_sinr(sinr_opts, argv_line);
    if (nc->parsed()) return cmd_nsp_check(nc_channel, nc_random, nc_seed, nc_tol, Index(nc_k));
  } catch (const omimo::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_io;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_validation;
  }
  return exit_validation;
}
