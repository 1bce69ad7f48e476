// SPDX-License-Identifier: Apache-2.0

#include "omimo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace omimo {

namespace {

constexpr double gain_db_floor = -400.0;

double db_from_power_ratio(double num, double den) {
  if (den <= 0.0) return db_cap;
  if (num <= 0.0) return -db_cap;
  return std::clamp(10.0 * std::log10(num / den), -db_cap, db_cap);
}

// Runs body(i) for i in [0, count). Results must be written to disjoint,
// preallocated slots; chunk boundaries therefore cannot affect the output.
void parallel_for(Index count, int threads, const std::function<void(Index)>& body) {
  if (threads <= 1 || count < 2) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  const int workers = int(std::min<Index>(threads, count));
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    const Index begin = count * w / workers;
    const Index end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (Index i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

TrialStats::Aggregate aggregate(const Eigen::VectorXd& values) {
  TrialStats::Aggregate agg;
  const Index n = values.size();
  agg.mean = values.mean();
  Eigen::VectorXd sorted = values;
  std::sort(sorted.begin(), sorted.end());
  agg.median = (n % 2 == 1) ? sorted(n / 2) : 0.5 * (sorted(n / 2 - 1) + sorted(n / 2));
  agg.stddev = n > 1 ? std::sqrt((values.array() - agg.mean).square().sum() / double(n - 1)) : 0.0;
  return agg;
}

Eigen::VectorXd normalized_db(const Eigen::VectorXd& gain) {
  const double peak = gain.maxCoeff();
  Eigen::VectorXd out(gain.size());
  for (Index i = 0; i < gain.size(); ++i) {
    const double g = peak > 0.0 ? gain(i) / peak : 0.0;
    out(i) = g > 0.0 ? std::max(10.0 * std::log10(g), gain_db_floor) : gain_db_floor;
  }
  return out;
}

}  // namespace

Index ThetaGrid::size() const {
  return Index(std::floor((max_deg - min_deg) / step_deg + 1e-9)) + 1;
}

Eigen::VectorXd ThetaGrid::degrees() const {
  Eigen::VectorXd out(size());
  for (Index i = 0; i < out.size(); ++i) out(i) = theta_deg(i);
  return out;
}

void ThetaGrid::validate() const {
  require(step_deg > 0.0, "grid: step must be positive");
  require(max_deg >= min_deg, "grid: max must be >= min");
}

void ScenarioConfig::validate() const {
  require(num_tx >= 1 && num_rx >= 1 && num_comms_rx >= 1,
          "config: antenna counts must be >= 1");
  require(tx_spacing > 0.0 && rx_spacing > 0.0, "config: spacings must be positive");
  require(trials >= 1, "config: trials must be >= 1");
  require(num_subarrays >= 1 && num_subarrays <= num_tx,
          "config: k must lie in [1, mt]");
  require(!subarray_counts.empty(), "config: k_list must not be empty");
  for (Index k : subarray_counts) {
    require(k >= 1 && k <= num_tx, "config: every k_list entry must lie in [1, mt]");
  }
  require(num_samples >= 2, "config: n_samples must be >= 2");
  require(!std::isnan(snr_db), "config: snr_db must not be NaN");
  require(!std::isnan(signal_power_db), "config: signal_power_db must not be NaN");
  grid.validate();
}

Eigen::MatrixXcd sample_channel(Index num_comms_rx, Index num_tx, RandomStream& rng) {
  require(num_comms_rx >= 1 && num_tx >= 1, "sample_channel: dimensions must be >= 1");
  Eigen::MatrixXcd h(num_comms_rx, num_tx);
  for (Index r = 0; r < num_comms_rx; ++r) {
    for (Index c = 0; c < num_tx; ++c) h(r, c) = rng.complex_gaussian();
  }
  return h;
}

ReceivedSignal simulate_received(const ScenarioConfig& config,
                                 const TransmitWeights<double>& weights,
                                 const WaveformBank<double>& bank, RandomStream& rng) {
  config.validate();
  const SubarrayPartition partition = make_partition(config.num_tx, config.num_subarrays);
  require(weights.elements_per_subarray() == partition.elements_per_subarray &&
              weights.num_subarrays() == partition.num_subarrays,
          "simulate_received: weights do not match config");
  require(bank.elements_per_subarray() == partition.elements_per_subarray &&
              bank.num_subarrays() == partition.num_subarrays,
          "simulate_received: waveform bank does not match config");

  const UniformLinearArray<double> rx(config.num_rx, config.rx_spacing);
  const Eigen::MatrixXcd waveforms = bank.all_waveforms();
  const double subarray_gain = std::sqrt(double(config.num_tx) / double(config.num_subarrays));

  // One reflected source: r(t) = gain * beta * sum over channels of
  // (c .* d)[ch] * waveform_ch(t), seen through the receive steering vector.
  const auto source = [&](double angle_deg, std::complex<double> beta) -> Eigen::MatrixXcd {
    const auto theta = Angle<double>::from_degrees(angle_deg);
    const CVector<double> cd =
        weighted_response_vector(partition, weights, theta, config.tx_spacing)
            .cwiseProduct(diversity_vector(partition, theta, config.tx_spacing));
    const Eigen::RowVectorXcd profile = cd.transpose() * waveforms;
    const CVector<double> b = steering_vector(rx, theta);
    return (subarray_gain * beta) * (b * profile);
  };

  ReceivedSignal rcv;
  const double target_amp = std::pow(10.0, config.signal_power_db / 20.0);
  rcv.beta_target = target_amp * rng.unit_phase();
  rcv.target = source(config.steer_deg, rcv.beta_target);

  rcv.interference = Eigen::MatrixXcd::Zero(config.num_rx, bank.num_samples());
  for (const Interferer& jam : config.interferers) {
    const std::complex<double> beta = std::pow(10.0, jam.power_db / 20.0) * rng.unit_phase();
    rcv.beta_interferers.push_back(beta);
    rcv.interference += source(jam.angle_deg, beta);
  }

  // Noise power per complex sample is referenced to a 0 dB target so that
  // snr_db is the per-element SNR of the nominal return: the time-domain
  // target power per element is num_tx / T0 for |beta| = 1.
  const double noise_var = double(config.num_tx) / bank.pulse().duration *
                           std::pow(10.0, -config.snr_db / 10.0);
  const double sigma = std::sqrt(noise_var);
  rcv.noise.resize(config.num_rx, bank.num_samples());
  for (Index r = 0; r < rcv.noise.rows(); ++r) {
    for (Index n = 0; n < rcv.noise.cols(); ++n) rcv.noise(r, n) = sigma * rng.complex_gaussian();
  }
  return rcv;
}

TrialStats output_sinr(const ScenarioConfig& config, int threads) {
  config.validate();
  const SubarrayPartition partition = make_partition(config.num_tx, config.num_subarrays);
  const auto steer = Angle<double>::from_degrees(config.steer_deg);
  const TransmitWeights<double> weights = transmit_weights(partition, steer, config.tx_spacing);
  const WaveformBank<double> bank(PulseShape<double>{}, partition.elements_per_subarray,
                                  partition.num_subarrays, config.num_samples);
  const UniformLinearArray<double> rx(config.num_rx, config.rx_spacing);
  // Non-adaptive receive weights: the virtual steering vector at the target.
  const CVector<double> w_d =
      virtual_steering(partition, weights, steer, config.tx_spacing, rx).u;
  const Eigen::MatrixXcd mixing = build_mixing_matrix(partition, weights);

  TrialStats stats;
  stats.sinr_db.resize(config.trials);
  stats.suppression_db.resize(config.trials);

  parallel_for(config.trials, threads, [&](Index trial) {
    RandomStream rng(config.seed, std::uint64_t(trial) + 1);
    const ReceivedSignal rcv = simulate_received(config, weights, bank, rng);
    const Eigen::MatrixXcd channel = sample_channel(config.num_comms_rx, config.num_tx, rng);

    const CVector<double> signal_v = bank.matched_filter_virtual(rcv.target);
    const CVector<double> rest_v =
        bank.matched_filter_virtual(Eigen::MatrixXcd(rcv.interference + rcv.noise));
    stats.sinr_db(trial) = db_from_power_ratio(std::norm(w_d.dot(signal_v)),
                                               std::norm(w_d.dot(rest_v)));

    const ProjectionMatrix<double> proj = null_space_projection(channel);
    const double supp = interference_suppression(channel, mixing, proj.p);
    // floored so the aggregates stay finite when the residual is exactly zero
    stats.suppression_db(trial) = std::max(supp, gain_db_floor);
  });

  stats.sinr = aggregate(stats.sinr_db);
  stats.suppression = aggregate(stats.suppression_db);
  return stats;
}

namespace {

// Shared sweep core: evaluates |u_ref^H u(theta)|^2 / ||u_ref||^4 over the
// grid for a caller-supplied virtual-steering builder.
Eigen::VectorXd sweep_column(const ThetaGrid& grid, int threads,
                             const std::function<CVector<double>(Angle<double>)>& steering,
                             Angle<double> steer) {
  const CVector<double> u_ref = steering(steer);
  const double ref_power = u_ref.squaredNorm();
  if (!(ref_power > 0.0)) {
    throw std::domain_error("beampattern sweep: reference steering vector has zero norm");
  }
  Eigen::VectorXd gain(grid.size());
  parallel_for(grid.size(), threads, [&](Index i) {
    const CVector<double> u = steering(Angle<double>::from_degrees(grid.theta_deg(i)));
    gain(i) = std::norm(u_ref.dot(u)) / (ref_power * ref_power);
  });
  return gain;
}

}  // namespace

BeampatternTable beampattern_sweep(const ScenarioConfig& config, int threads) {
  config.validate();
  const auto steer = Angle<double>::from_degrees(config.steer_deg);
  const UniformLinearArray<double> rx(config.num_rx, config.rx_spacing);

  BeampatternTable table;
  table.theta_deg = config.grid.degrees();
  for (Index k : config.subarray_counts) {
    const SubarrayPartition partition = make_partition(config.num_tx, k);
    const TransmitWeights<double> weights =
        transmit_weights(partition, steer, config.tx_spacing);
    const auto steering = [&](Angle<double> theta) {
      return virtual_steering(partition, weights, theta, config.tx_spacing, rx).u;
    };
    table.columns.push_back({"gain_db_K" + std::to_string(k),
                             normalized_db(sweep_column(config.grid, threads, steering, steer))});
  }
  return table;
}

BeampatternTable beampattern_sweep_nsp(const ScenarioConfig& config,
                                       const ProjectionMatrix<double>& projector,
                                       int threads) {
  require(projector.p.rows() == config.num_tx && projector.p.cols() == config.num_tx,
          "beampattern_sweep_nsp: projector does not match the transmit array");
  BeampatternTable table = beampattern_sweep(config, threads);

  const auto steer = Angle<double>::from_degrees(config.steer_deg);
  const UniformLinearArray<double> tx(config.num_tx, config.tx_spacing);
  const UniformLinearArray<double> rx(config.num_rx, config.rx_spacing);
  const Eigen::MatrixXcd projector_h = projector.p.adjoint();

  for (Index k : config.subarray_counts) {
    const SubarrayPartition partition = make_partition(config.num_tx, k);
    const TransmitWeights<double> weights =
        transmit_weights(partition, steer, config.tx_spacing);
    const Eigen::MatrixXcd mixing_h = build_mixing_matrix(partition, weights).adjoint();
    const auto steering = [&](Angle<double> theta) {
      const CVector<double> response = mixing_h * (projector_h * steering_vector(tx, theta));
      return kron(response, steering_vector(rx, theta));
    };
    table.columns.push_back({"gain_db_K" + std::to_string(k) + "_nsp",
                             normalized_db(sweep_column(config.grid, threads, steering, steer))});
  }
  return table;
}

SidelobeMetrics sidelobe_metrics(const Eigen::VectorXd& theta_deg,
                                 const Eigen::VectorXd& gain_db,
                                 double mainlobe_exclusion_deg) {
  require(theta_deg.size() == gain_db.size(), "sidelobe_metrics: column length mismatch");
  require(theta_deg.size() >= 3, "sidelobe_metrics: need at least three grid points");

  Index peak = 0;
  gain_db.maxCoeff(&peak);
  SidelobeMetrics metrics;
  metrics.peak_theta_deg = theta_deg(peak);

  // A flat pattern has no spatial selectivity; the sidelobe level is undefined.
  if (gain_db.maxCoeff() - gain_db.minCoeff() < 1e-9) {
    metrics.psl_defined = false;
    metrics.psl_db = std::numeric_limits<double>::quiet_NaN();
    metrics.mainlobe_width_deg = std::numeric_limits<double>::quiet_NaN();
    return metrics;
  }

  // First null on each side of the peak: the first local minimum of the curve
  // (gradient sign change; exact nulls show up as deep dips on the grid).
  const Index n = gain_db.size();
  Index right = -1;
  for (Index i = peak + 1; i + 1 < n; ++i) {
    if (gain_db(i) <= gain_db(i - 1) && gain_db(i) < gain_db(i + 1)) {
      right = i;
      break;
    }
  }
  Index left = -1;
  for (Index i = peak - 1; i >= 1; --i) {
    if (gain_db(i) <= gain_db(i + 1) && gain_db(i) < gain_db(i - 1)) {
      left = i;
      break;
    }
  }
  if (left < 0 || right < 0) {
    throw std::runtime_error("sidelobe_metrics: theta grid too coarse to locate mainlobe nulls");
  }
  metrics.mainlobe_width_deg = theta_deg(right) - theta_deg(left);

  double best = std::numeric_limits<double>::lowest();
  bool found = false;
  for (Index i = 0; i < n; ++i) {
    const bool excluded = mainlobe_exclusion_deg > 0.0
                              ? std::abs(theta_deg(i) - theta_deg(peak)) <= mainlobe_exclusion_deg
                              : (i >= left && i <= right);
    if (!excluded && gain_db(i) > best) {
      best = gain_db(i);
      found = true;
    }
  }
  if (!found) {
    throw std::runtime_error("sidelobe_metrics: exclusion region covers the whole grid");
  }
  metrics.psl_db = best - gain_db(peak);
  return metrics;
}

double interference_suppression(const Eigen::MatrixXcd& channel,
                                const Eigen::MatrixXcd& mixing,
                                const Eigen::MatrixXcd& projector) {
  require(channel.cols() == projector.rows() && projector.cols() == mixing.rows(),
          "interference_suppression: dimension mismatch");
  const double baseline = (channel * mixing).squaredNorm();
  if (!(baseline > 0.0)) {
    throw std::invalid_argument("interference_suppression: channel annihilates the mixing matrix");
  }
  const double residual = (channel * (projector * mixing)).squaredNorm();
  if (residual == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(residual / baseline);
}

std::vector<ApertureSweepPoint> k_sweep(Index num_elements) {
  require(num_elements >= 1, "k_sweep: need at least one element");
  std::vector<ApertureSweepPoint> points;
  points.reserve(std::size_t(num_elements));
  for (Index k = 1; k <= num_elements; ++k) {
    points.push_back({k, effective_aperture(num_elements, k)});
  }
  return points;
}

std::vector<Index> k_sweep_argmax(Index num_elements) {
  const auto points = k_sweep(num_elements);
  Index best = 0;
  for (const auto& pt : points) best = std::max(best, pt.effective_aperture);
  std::vector<Index> argmax;
  for (const auto& pt : points) {
    if (pt.effective_aperture == best) argmax.push_back(pt.num_subarrays);
  }
  return argmax;
}

}  // namespace omimo
