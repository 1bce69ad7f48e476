// SPDX-License-Identifier: Apache-2.0
//
// ULA geometry, transmit/receive steering vectors and the full-MIMO virtual array.

#ifndef OMIMO_ARRAY_MODEL_HPP
#define OMIMO_ARRAY_MODEL_HPP

#include "omimo/types.hpp"

#include <cmath>

namespace omimo {

// Plane-wave direction. Stored in radians; degrees only at external boundaries.
// Broadside scan angles live in [-pi/2, pi/2]; no wrap-around is applied.
template <typename Scalar>
struct Angle {
  Scalar radians{0};

  Angle() = default;
  constexpr explicit Angle(Scalar rad) : radians(rad) {}

  static Angle from_degrees(Scalar deg) {
    return Angle(deg * std::numbers::pi_v<Scalar> / Scalar(180));
  }
  Scalar degrees() const { return radians * Scalar(180) / std::numbers::pi_v<Scalar>; }
};

// Equally spaced collinear omnidirectional elements.
// Spacing is measured in wavelengths of the carrier.
template <typename Scalar>
struct UniformLinearArray {
  Index num_elements{1};
  Scalar spacing{Scalar(0.5)};

  UniformLinearArray(Index elements, Scalar spacing_wavelengths)
      : num_elements(elements), spacing(spacing_wavelengths) {
    require(num_elements >= 1, "UniformLinearArray: need at least one element");
    require(spacing > Scalar(0), "UniformLinearArray: spacing must be positive");
  }
};

// Steering vector of the array toward `theta`.
// Element m (0-based) carries the phase exp(-j*2*pi*spacing*m*sin(theta));
// the first element is the phase reference and equals 1.
template <typename Scalar>
CVector<Scalar> steering_vector(const UniformLinearArray<Scalar>& array, Angle<Scalar> theta) {
  const Scalar step = -two_pi<Scalar> * array.spacing * std::sin(theta.radians);
  CVector<Scalar> v(array.num_elements);
  for (Index m = 0; m < array.num_elements; ++m) {
    v(m) = std::polar(Scalar(1), step * Scalar(m));
  }
  return v;
}

// Virtual steering vector of a collocated MIMO transmit/receive pair:
// the Kronecker product of the transmit and receive steering vectors.
// Entry (mt*M_R + mr) = exp(-j*2*pi*(mt*d_T + mr*d_R)*sin(theta)).
template <typename Scalar>
CVector<Scalar> virtual_steering_full_mimo(const UniformLinearArray<Scalar>& tx,
                                           const UniformLinearArray<Scalar>& rx,
                                           Angle<Scalar> theta) {
  return kron(steering_vector(tx, theta), steering_vector(rx, theta));
}

}  // namespace omimo

#endif  // OMIMO_ARRAY_MODEL_HPP
