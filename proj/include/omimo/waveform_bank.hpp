// SPDX-License-Identifier: Apache-2.0
//
// Orthogonal baseband pulse bank, Gram-matrix verification, matched filtering.

#ifndef OMIMO_WAVEFORM_BANK_HPP
#define OMIMO_WAVEFORM_BANK_HPP

#include "omimo/types.hpp"

#include <cmath>

namespace omimo {

enum class PulseKind { rectangular };

// Baseband pulse envelope Q(t) over one pulse width, energy-normalized so that
// the discrete left-endpoint quadrature of |Q|^2 over [0, duration) is exactly 1.
template <typename Scalar>
struct PulseShape {
  PulseKind kind{PulseKind::rectangular};
  Scalar duration{1};

  PulseShape() = default;
  PulseShape(PulseKind k, Scalar t0) : kind(k), duration(t0) {
    require(duration > Scalar(0), "PulseShape: duration must be positive");
  }

  Scalar amplitude_at(Scalar /*t*/) const {
    // rectangular: constant 1/sqrt(T0) inside the pulse
    return Scalar(1) / std::sqrt(duration);
  }
};

// How the per-subarray, per-element waveform index maps to a carrier offset.
//   linear:  f(m,k) = (k-1)*M_m + (m-1), collision-free by construction
//   product: f(m,k) = m*k, which collides for distinct (m,k) pairs and
//            therefore breaks mutual orthogonality; kept for comparison
//            experiments against the colliding mapping.
enum class WaveformIndexing { linear, product };

// Bank of sampled waveforms Q(t) * exp(j*2*pi*f(m,k)*t/T0), m = 1..M_m, k = 1..K,
// sampled at t_n = n*T0/N_s. With integer frequency offsets and uniform
// left-endpoint quadrature of weight T0/N_s, distinct offsets are exactly
// orthogonal and every waveform has unit energy.
template <typename Scalar>
class WaveformBank {
 public:
  WaveformBank(PulseShape<Scalar> pulse, Index elements_per_subarray, Index num_subarrays,
               Index num_samples = 1024, WaveformIndexing mode = WaveformIndexing::linear)
      : pulse_(pulse),
        elements_per_subarray_(elements_per_subarray),
        num_subarrays_(num_subarrays),
        num_samples_(num_samples),
        mode_(mode) {
    require(elements_per_subarray_ >= 1, "WaveformBank: elements_per_subarray must be >= 1");
    require(num_subarrays_ >= 1, "WaveformBank: num_subarrays must be >= 1");
    // Nyquist margin for the largest discrete carrier offset.
    require(num_samples_ >= 2 * max_frequency_index() + 2,
            "WaveformBank: num_samples too small for the highest frequency index");
  }

  Index elements_per_subarray() const { return elements_per_subarray_; }
  Index num_subarrays() const { return num_subarrays_; }
  Index num_waveforms() const { return elements_per_subarray_ * num_subarrays_; }
  Index num_samples() const { return num_samples_; }
  WaveformIndexing mode() const { return mode_; }
  const PulseShape<Scalar>& pulse() const { return pulse_; }

  // Quadrature weight of one sample, T0/N_s.
  Scalar sample_weight() const { return pulse_.duration / Scalar(num_samples_); }

  // Stacked channel index of waveform (m,k), both 1-based: (k-1)*M_m + (m-1).
  Index flat_index(Index m, Index k) const {
    check_indices(m, k);
    return (k - 1) * elements_per_subarray_ + (m - 1);
  }

  Index frequency_index(Index m, Index k) const {
    check_indices(m, k);
    return mode_ == WaveformIndexing::linear ? (k - 1) * elements_per_subarray_ + (m - 1)
                                             : m * k;
  }

  Index max_frequency_index() const {
    return mode_ == WaveformIndexing::linear ? num_waveforms() - 1
                                             : elements_per_subarray_ * num_subarrays_;
  }

  // Sampled waveform for subarray k, element m (1-based indices).
  CVector<Scalar> waveform(Index m, Index k) const {
    const Index f = frequency_index(m, k);
    CVector<Scalar> samples(num_samples_);
    const Scalar dt = pulse_.duration / Scalar(num_samples_);
    for (Index n = 0; n < num_samples_; ++n) {
      const Scalar envelope = pulse_.amplitude_at(Scalar(n) * dt);
      const Scalar phase = two_pi<Scalar> * Scalar(f) * Scalar(n) / Scalar(num_samples_);
      samples(n) = envelope * std::polar(Scalar(1), phase);
    }
    return samples;
  }

  // All waveforms as rows, in flat-index order: (num_waveforms x num_samples).
  CMatrix<Scalar> all_waveforms() const {
    CMatrix<Scalar> rows(num_waveforms(), num_samples_);
    for (Index k = 1; k <= num_subarrays_; ++k) {
      for (Index m = 1; m <= elements_per_subarray_; ++m) {
        rows.row(flat_index(m, k)) = waveform(m, k).transpose();
      }
    }
    return rows;
  }

  // Discrete pulse-length correlation matrix; entry (p,q) approximates the
  // integral of waveform_p * conj(waveform_q) over one pulse. Identity in
  // linear mode.
  CMatrix<Scalar> gram_matrix() const {
    const CMatrix<Scalar> rows = all_waveforms();
    return sample_weight() * (rows * rows.adjoint());
  }

  // Correlates one received sample stream against every conjugated waveform,
  // quadrature-weighted. Output length num_waveforms, flat-index order.
  CVector<Scalar> matched_filter(const CVector<Scalar>& received) const {
    require(received.size() == num_samples_, "matched_filter: sample-count mismatch");
    return sample_weight() * (all_waveforms().conjugate() * received);
  }

  // Matched-filters every receive element (rows of `received`) and stacks the
  // outputs channel-major: entry (ch*M_R + r) is channel ch seen at element r.
  CVector<Scalar> matched_filter_virtual(const CMatrix<Scalar>& received) const {
    require(received.cols() == num_samples_, "matched_filter_virtual: sample-count mismatch");
    const Index num_rx = received.rows();
    const CMatrix<Scalar> per_channel =
        sample_weight() * (all_waveforms().conjugate() * received.transpose());
    CVector<Scalar> stacked(num_waveforms() * num_rx);
    for (Index ch = 0; ch < num_waveforms(); ++ch) {
      stacked.segment(ch * num_rx, num_rx) = per_channel.row(ch).transpose();
    }
    return stacked;
  }

 private:
  void check_indices(Index m, Index k) const {
    require(m >= 1 && m <= elements_per_subarray_, "WaveformBank: element index out of range");
    require(k >= 1 && k <= num_subarrays_, "WaveformBank: subarray index out of range");
  }

  PulseShape<Scalar> pulse_;
  Index elements_per_subarray_;
  Index num_subarrays_;
  Index num_samples_;
  WaveformIndexing mode_;
};

}  // namespace omimo

#endif  // OMIMO_WAVEFORM_BANK_HPP
