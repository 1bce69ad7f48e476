// SPDX-License-Identifier: Apache-2.0
//
// Overlapped-subarray transmit structure: partitioning, non-adaptive weights,
// waveform-diversity phases, virtual steering and normalized beampatterns.

#ifndef OMIMO_OVERLAPPED_HPP
#define OMIMO_OVERLAPPED_HPP

#include "omimo/array_model.hpp"
#include "omimo/types.hpp"

#include <cmath>

namespace omimo {

// Contiguous overlapped decomposition of a transmit ULA: `num_subarrays`
// groups of `elements_per_subarray` = num_elements - num_subarrays + 1
// elements each; subarray k (1-based) starts at physical element k-1, so
// adjacent subarrays share all but one element.
struct SubarrayPartition {
  Index num_elements{1};          // transmit elements in the full array
  Index num_subarrays{1};         // K
  Index elements_per_subarray{1}; // per-subarray element count

  // Physical element index (0-based) of element m of subarray k (both 1-based).
  Index physical_element(Index m, Index k) const { return (k - 1) + (m - 1); }

  // Stacked channel index for (m,k), matching the waveform-bank flat order.
  Index flat_index(Index m, Index k) const {
    return (k - 1) * elements_per_subarray + (m - 1);
  }

  Index num_channels() const { return elements_per_subarray * num_subarrays; }
};

inline SubarrayPartition make_partition(Index num_elements, Index num_subarrays) {
  require(num_elements >= 1, "make_partition: need at least one element");
  require(num_subarrays >= 1 && num_subarrays <= num_elements,
          "make_partition: subarray count must lie in [1, num_elements]");
  return SubarrayPartition{num_elements, num_subarrays,
                           num_elements - num_subarrays + 1};
}

// Steering vector seen within one subarray, phase-referenced to the
// subarray's first element. Identical for every subarray of a ULA.
template <typename Scalar>
CVector<Scalar> subarray_steering(const SubarrayPartition& partition, Angle<Scalar> theta,
                                  Scalar tx_spacing) {
  return steering_vector(UniformLinearArray<Scalar>(partition.elements_per_subarray, tx_spacing),
                         theta);
}

// Unit-norm non-adaptive beamforming weights, one column per subarray.
template <typename Scalar>
struct TransmitWeights {
  CMatrix<Scalar> w;  // elements_per_subarray x num_subarrays

  Index elements_per_subarray() const { return w.rows(); }
  Index num_subarrays() const { return w.cols(); }
};

template <typename Scalar>
TransmitWeights<Scalar> transmit_weights(const SubarrayPartition& partition,
                                         Angle<Scalar> steer, Scalar tx_spacing) {
  const CVector<Scalar> a = subarray_steering(partition, steer, tx_spacing);
  const CVector<Scalar> wk = a / a.norm();
  TransmitWeights<Scalar> weights;
  weights.w.resize(partition.elements_per_subarray, partition.num_subarrays);
  for (Index k = 0; k < partition.num_subarrays; ++k) weights.w.col(k) = wk;
  return weights;
}

// Inter-subarray propagation phases, stacked over (m,k): entry (m,k) =
// exp(-j*2*pi*tx_spacing*(k-1)*sin(theta)). Subarray k starts one element
// after subarray k-1, so the offset grows by one spacing per subarray; the
// within-subarray phases live in the subarray steering vector instead.
template <typename Scalar>
CVector<Scalar> diversity_vector(const SubarrayPartition& partition, Angle<Scalar> theta,
                                 Scalar tx_spacing) {
  CVector<Scalar> d(partition.num_channels());
  const Scalar step = -two_pi<Scalar> * tx_spacing * std::sin(theta.radians);
  for (Index k = 1; k <= partition.num_subarrays; ++k) {
    d.segment((k - 1) * partition.elements_per_subarray, partition.elements_per_subarray)
        .setConstant(std::polar(Scalar(1), step * Scalar(k - 1)));
  }
  return d;
}

// Per-element weighted transmit response, stacked over (m,k): entry (m,k) =
// conj(w_k[m]) * a_k[m](theta). The conjugated-weight convention makes the
// per-subarray sum coherent (equal to sqrt(M_m)) at the steering direction.
template <typename Scalar>
CVector<Scalar> weighted_response_vector(const SubarrayPartition& partition,
                                         const TransmitWeights<Scalar>& weights,
                                         Angle<Scalar> theta, Scalar tx_spacing) {
  require(weights.elements_per_subarray() == partition.elements_per_subarray &&
              weights.num_subarrays() == partition.num_subarrays,
          "weighted_response_vector: weights do not match partition");
  const CVector<Scalar> a = subarray_steering(partition, theta, tx_spacing);
  CVector<Scalar> c(partition.num_channels());
  for (Index k = 1; k <= partition.num_subarrays; ++k) {
    c.segment((k - 1) * partition.elements_per_subarray, partition.elements_per_subarray) =
        weights.w.col(k - 1).conjugate().cwiseProduct(a);
  }
  return c;
}

// Virtual steering vector of the overlapped transmit structure combined with
// the receive array: u = (c .* d) kron b, with the constituents retained.
//   u: combined virtual steering, length M_m*K*M_R
//   c: per-element weighted transmit response, length M_m*K
//   d: inter-subarray diversity phases, length M_m*K
//   b: receive steering vector, length M_R
template <typename Scalar>
struct VirtualSteering {
  CVector<Scalar> u;
  CVector<Scalar> c;
  CVector<Scalar> d;
  CVector<Scalar> b;
};

template <typename Scalar>
VirtualSteering<Scalar> virtual_steering(const SubarrayPartition& partition,
                                         const TransmitWeights<Scalar>& weights,
                                         Angle<Scalar> theta, Scalar tx_spacing,
                                         const UniformLinearArray<Scalar>& rx) {
  VirtualSteering<Scalar> vs;
  vs.c = weighted_response_vector(partition, weights, theta, tx_spacing);
  vs.d = diversity_vector(partition, theta, tx_spacing);
  vs.b = steering_vector(rx, theta);
  vs.u = kron(CVector<Scalar>(vs.c.cwiseProduct(vs.d)), vs.b);
  return vs;
}

// Normalized overall transmit/receive beampattern,
// G(theta) = |u(theta_s)^H u(theta)|^2 / ||u(theta_s)||^4, in [0, 1] with
// G(theta_s) = 1.
template <typename Scalar>
Scalar beampattern(const SubarrayPartition& partition, const TransmitWeights<Scalar>& weights,
                   Angle<Scalar> steer, Angle<Scalar> theta, Scalar tx_spacing,
                   const UniformLinearArray<Scalar>& rx) {
  const CVector<Scalar> u_ref = virtual_steering(partition, weights, steer, tx_spacing, rx).u;
  const Scalar ref_power = u_ref.squaredNorm();
  if (!(ref_power > Scalar(0))) {
    throw std::domain_error("beampattern: reference steering vector has zero norm");
  }
  const CVector<Scalar> u = virtual_steering(partition, weights, theta, tx_spacing, rx).u;
  return std::norm(u_ref.dot(u)) / (ref_power * ref_power);
}

// ULA closed form of the same pattern. The subarray steering factor is shared
// by all subarrays, so the pattern factors into a subarray term and a
// (diversity kron receive) term:
//   G(theta) = |a^H(theta_s) a(theta) * (d(theta_s) kron b(theta_s))^H
//              (d(theta) kron b(theta))|^2 / (||a(theta_s)||^4 ||d kron b||^4)
// with a the M_m-element subarray steering and d the K per-subarray phases.
template <typename Scalar>
Scalar beampattern_ula_closed_form(const SubarrayPartition& partition, Angle<Scalar> steer,
                                   Angle<Scalar> theta, Scalar tx_spacing,
                                   const UniformLinearArray<Scalar>& rx) {
  const auto subarray_axis =
      UniformLinearArray<Scalar>(partition.elements_per_subarray, tx_spacing);
  const auto offsets_axis = UniformLinearArray<Scalar>(partition.num_subarrays, tx_spacing);

  const CVector<Scalar> a_ref = steering_vector(subarray_axis, steer);
  const CVector<Scalar> a = steering_vector(subarray_axis, theta);
  const CVector<Scalar> db_ref =
      kron(steering_vector(offsets_axis, steer), steering_vector(rx, steer));
  const CVector<Scalar> db = kron(steering_vector(offsets_axis, theta), steering_vector(rx, theta));

  const Scalar a_power = a_ref.squaredNorm();
  const Scalar db_power = db_ref.squaredNorm();
  return std::norm(a_ref.dot(a) * db_ref.dot(db)) / (a_power * a_power * db_power * db_power);
}

// Virtual transmit dimension of the overlapped structure, (M_T - K + 1) * K.
inline Index effective_aperture(Index num_elements, Index num_subarrays) {
  require(num_elements >= 1, "effective_aperture: need at least one element");
  require(num_subarrays >= 1 && num_subarrays <= num_elements,
          "effective_aperture: subarray count out of range");
  return (num_elements - num_subarrays + 1) * num_subarrays;
}

// Subarray count maximizing the effective aperture: floor((M_T + 1) / 2).
// For even element counts the maximum is tied with the next integer up.
inline Index optimal_subarrays(Index num_elements) {
  require(num_elements >= 1, "optimal_subarrays: need at least one element");
  return (num_elements + 1) / 2;
}

// Per-physical-element excitation map W (num_elements x num_channels):
// column (m,k) is zero except at the physical row of element m in subarray k,
// where it carries sqrt(M_T/K) * w_k[m]. W^H applied to the transmit steering
// vector reproduces sqrt(M_T/K) * (c .* d) entrywise, which ties the physical
// signal picture to the virtual-steering picture.
template <typename Scalar>
CMatrix<Scalar> build_mixing_matrix(const SubarrayPartition& partition,
                                    const TransmitWeights<Scalar>& weights) {
  require(weights.elements_per_subarray() == partition.elements_per_subarray &&
              weights.num_subarrays() == partition.num_subarrays,
          "build_mixing_matrix: weights do not match partition");
  const Scalar gain =
      std::sqrt(Scalar(partition.num_elements) / Scalar(partition.num_subarrays));
  CMatrix<Scalar> mixing = CMatrix<Scalar>::Zero(partition.num_elements, partition.num_channels());
  for (Index k = 1; k <= partition.num_subarrays; ++k) {
    for (Index m = 1; m <= partition.elements_per_subarray; ++m) {
      mixing(partition.physical_element(m, k), partition.flat_index(m, k)) =
          gain * weights.w(m - 1, k - 1);
    }
  }
  return mixing;
}

}  // namespace omimo

#endif  // OMIMO_OVERLAPPED_HPP
