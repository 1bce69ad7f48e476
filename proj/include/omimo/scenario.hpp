// SPDX-License-Identifier: Apache-2.0
//
// End-to-end simulation engine: seeded channels, received-signal synthesis,
// matched filtering, output SINR over Monte-Carlo trials, beampattern sweeps
// (with and without null-space projection), sidelobe metrics and the
// subarray-count sweep.

#ifndef OMIMO_SCENARIO_HPP
#define OMIMO_SCENARIO_HPP

#include "omimo/nsp.hpp"
#include "omimo/overlapped.hpp"
#include "omimo/rng.hpp"
#include "omimo/waveform_bank.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace omimo {

struct Interferer {
  double angle_deg{0};
  double power_db{0};  // relative to a 0 dB target
};

// Uniform angle grid in degrees, inclusive of both ends.
struct ThetaGrid {
  double min_deg{-90.0};
  double max_deg{90.0};
  double step_deg{0.1};

  Index size() const;
  double theta_deg(Index i) const { return min_deg + double(i) * step_deg; }
  Eigen::VectorXd degrees() const;
  void validate() const;
};

// Full description of one simulation run. Defaults follow the reference
// desk-scale setup: a 20x20 half-wavelength radar pair steered to +15 deg,
// a 4-antenna communications receiver, interferers at -30 and -10 deg.
struct ScenarioConfig {
  Index num_tx{20};        // radar transmit elements (mt)
  Index num_rx{20};        // radar receive elements (mr)
  Index num_comms_rx{4};   // communications receive antennas (nr)
  double tx_spacing{0.5};  // wavelengths (dt)
  double rx_spacing{0.5};  // wavelengths (dr)
  double steer_deg{15.0};  // target direction (theta_s_deg)
  std::vector<Interferer> interferers{{-30.0, 30.0}, {-10.0, 30.0}};
  Index num_subarrays{5};                    // K used by the SINR engine (k)
  std::vector<Index> subarray_counts{1, 5, 10, 20};  // K list swept by beampattern (k_list)
  double snr_db{20.0};          // per-element SNR of a 0 dB target return
  double signal_power_db{0.0};  // target reflection power
  Index trials{100};
  std::uint64_t seed{1};
  ThetaGrid grid{};
  Index num_samples{1024};  // waveform samples per pulse

  void validate() const;  // throws std::invalid_argument with a reason
};

// Interference channel draw: i.i.d. circularly-symmetric complex Gaussian
// entries with unit variance (Rayleigh-distributed magnitudes).
Eigen::MatrixXcd sample_channel(Index num_comms_rx, Index num_tx, RandomStream& rng);

// One pulse of received data, kept decomposed so tests and the SINR engine
// can treat target, interference and noise exactly. Rows are receive
// elements, columns are samples. Draw order within the stream: target
// reflection coefficient, interferer coefficients, then the noise matrix.
struct ReceivedSignal {
  Eigen::MatrixXcd target;
  Eigen::MatrixXcd interference;
  Eigen::MatrixXcd noise;
  std::complex<double> beta_target{0.0, 0.0};
  std::vector<std::complex<double>> beta_interferers;

  Eigen::MatrixXcd total() const { return target + interference + noise; }
};

ReceivedSignal simulate_received(const ScenarioConfig& config,
                                 const TransmitWeights<double>& weights,
                                 const WaveformBank<double>& bank, RandomStream& rng);

// Reported dB values are clamped to this symmetric range so that noise-free
// or fully-nulled configurations stay representable.
inline constexpr double db_cap = 300.0;

// Per-trial output SINR (non-adaptive receive weights matched to the steering
// direction) and per-trial radar-to-communications interference suppression
// under null-space projection of that trial's channel draw.
struct TrialStats {
  Eigen::VectorXd sinr_db;
  Eigen::VectorXd suppression_db;

  struct Aggregate {
    double mean{0};
    double median{0};
    double stddev{0};
  };
  Aggregate sinr;
  Aggregate suppression;
};

TrialStats output_sinr(const ScenarioConfig& config, int threads = 1);

// One labeled gain column, normalized so its grid maximum sits at 0 dB.
struct BeampatternColumn {
  std::string label;
  Eigen::VectorXd gain_db;
};

struct BeampatternTable {
  Eigen::VectorXd theta_deg;
  std::vector<BeampatternColumn> columns;
};

// Gain columns for every configured subarray count.
BeampatternTable beampattern_sweep(const ScenarioConfig& config, int threads = 1);

// Same, plus one projected column per subarray count. The projected pattern
// replaces the transmit excitation by projector * mixing-matrix, i.e. the
// virtual steering becomes (W^H P^H a(theta)) kron b(theta); an identity
// projector reproduces the unprojected columns.
BeampatternTable beampattern_sweep_nsp(const ScenarioConfig& config,
                                       const ProjectionMatrix<double>& projector,
                                       int threads = 1);

// Peak sidelobe level (dB relative to the column peak) and null-to-null
// mainlobe width. With mainlobe_exclusion_deg <= 0 the exclusion region is
// the detected null-to-null mainlobe; otherwise it is peak +- exclusion.
// Patterns without spatial selectivity report psl_defined = false and NaN
// metrics. A grid too coarse to locate the mainlobe nulls is an error.
struct SidelobeMetrics {
  double peak_theta_deg{0};
  double psl_db{0};
  double mainlobe_width_deg{0};
  bool psl_defined{true};
};

SidelobeMetrics sidelobe_metrics(const Eigen::VectorXd& theta_deg,
                                 const Eigen::VectorXd& gain_db,
                                 double mainlobe_exclusion_deg = 0.0);

// Residual radar power at the communications receiver after projection,
// 10*log10(||H P W||_F^2 / ||H W||_F^2). A zero denominator is an error; an
// exactly nulled numerator returns -infinity.
double interference_suppression(const Eigen::MatrixXcd& channel,
                                const Eigen::MatrixXcd& mixing,
                                const Eigen::MatrixXcd& projector);

// Effective aperture for every subarray count 1..num_elements.
struct ApertureSweepPoint {
  Index num_subarrays{1};
  Index effective_aperture{1};
};

std::vector<ApertureSweepPoint> k_sweep(Index num_elements);

// All subarray counts attaining the maximum effective aperture.
std::vector<Index> k_sweep_argmax(Index num_elements);

}  // namespace omimo

#endif  // OMIMO_SCENARIO_HPP
