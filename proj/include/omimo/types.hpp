// SPDX-License-Identifier: Apache-2.0
//
// omimo: overlapped-MIMO radar waveforms and null-space-projection spectrum sharing

#ifndef OMIMO_TYPES_HPP
#define OMIMO_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>

namespace omimo {

using Index = Eigen::Index;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using CVector = Eigen::Vector<Complex<Scalar>, Eigen::Dynamic>;

template <typename Scalar>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RVector = Eigen::Vector<Scalar, Eigen::Dynamic>;

template <typename Scalar>
inline constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;

// Kronecker product of two column vectors; entry (i*b.size()+j) = a[i]*b[j].
template <typename Scalar>
CVector<Scalar> kron(const CVector<Scalar>& a, const CVector<Scalar>& b) {
  CVector<Scalar> out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

inline void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace omimo

#endif  // OMIMO_TYPES_HPP
