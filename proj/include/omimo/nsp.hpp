// SPDX-License-Identifier: Apache-2.0
//
// Null-space projection of transmit signals against an interference channel,
// built from the channel's singular value decomposition.

#ifndef OMIMO_NSP_HPP
#define OMIMO_NSP_HPP

#include "omimo/overlapped.hpp"
#include "omimo/types.hpp"

#include <Eigen/SVD>

namespace omimo {

// Default relative threshold for deciding which singular values are zero.
template <typename Scalar>
inline constexpr Scalar default_rank_tolerance = Scalar(1e-12);

// Singular values of a channel, descending, together with the numerical rank
// under a relative threshold tol * sigma_1 (all-zero channels have rank 0).
template <typename Scalar>
struct SingularSpectrum {
  RVector<Scalar> values;
  Index numerical_rank{0};
  Scalar tolerance{default_rank_tolerance<Scalar>};
};

template <typename Scalar>
SingularSpectrum<Scalar> singular_spectrum(const CMatrix<Scalar>& channel,
                                           Scalar tol = default_rank_tolerance<Scalar>) {
  require(tol > Scalar(0), "singular_spectrum: tolerance must be positive");
  require(channel.allFinite(), "singular_spectrum: channel has non-finite entries");
  Eigen::JacobiSVD<CMatrix<Scalar>> svd(channel);
  SingularSpectrum<Scalar> spectrum;
  spectrum.values = svd.singularValues();
  spectrum.tolerance = tol;
  const Scalar largest = spectrum.values.size() > 0 ? spectrum.values(0) : Scalar(0);
  if (largest > Scalar(0)) {
    const Scalar threshold = tol * largest;
    spectrum.numerical_rank =
        (spectrum.values.array() > threshold).template cast<Index>().sum();
  }
  return spectrum;
}

// Orthogonal projector onto the null space of a channel. Hermitian,
// idempotent, annihilated by the channel, with rank = columns - rank(channel).
template <typename Scalar>
struct ProjectionMatrix {
  CMatrix<Scalar> p;
  Index rank{0};
  Scalar tolerance{default_rank_tolerance<Scalar>};
  SingularSpectrum<Scalar> spectrum;  // of the channel the projector was built from
};

// Builds the projector from the SVD of the channel: keep the right-singular
// directions whose singular values fall at or below the rank threshold
// (including the directions beyond min(rows, cols)) and form V' V'^H over
// exactly those columns.
template <typename Scalar>
ProjectionMatrix<Scalar> null_space_projection(const CMatrix<Scalar>& channel,
                                               Scalar tol = default_rank_tolerance<Scalar>) {
  require(tol > Scalar(0), "null_space_projection: tolerance must be positive");
  require(channel.allFinite(), "null_space_projection: channel has non-finite entries");
  const Index dim = channel.cols();

  Eigen::JacobiSVD<CMatrix<Scalar>> svd(channel, Eigen::ComputeFullV);
  ProjectionMatrix<Scalar> proj;
  proj.tolerance = tol;
  proj.spectrum.values = svd.singularValues();
  proj.spectrum.tolerance = tol;

  const Scalar largest = proj.spectrum.values.size() > 0 ? proj.spectrum.values(0) : Scalar(0);
  Index p = 0;
  if (largest > Scalar(0)) {
    const Scalar threshold = tol * largest;
    p = (proj.spectrum.values.array() > threshold).template cast<Index>().sum();
  }
  proj.spectrum.numerical_rank = p;
  proj.rank = dim - p;

  if (p == 0) {
    // sigma_1 = 0 only for the all-zero channel; the whole domain is null space.
    proj.p = CMatrix<Scalar>::Identity(dim, dim);
  } else if (proj.rank == 0) {
    proj.p = CMatrix<Scalar>::Zero(dim, dim);
  } else {
    const CMatrix<Scalar> basis = svd.matrixV().rightCols(proj.rank);
    proj.p = basis * basis.adjoint();
  }
  return proj;
}

// Applies the projector to a signal vector (or to each column of a matrix of
// per-sample signal vectors).
template <typename Scalar>
CVector<Scalar> project_signal(const ProjectionMatrix<Scalar>& proj, const CVector<Scalar>& x) {
  require(x.size() == proj.p.cols(), "project_signal: signal dimension mismatch");
  return proj.p * x;
}

template <typename Scalar>
CMatrix<Scalar> project_signal(const ProjectionMatrix<Scalar>& proj, const CMatrix<Scalar>& x) {
  require(x.rows() == proj.p.cols(), "project_signal: signal dimension mismatch");
  return proj.p * x;
}

// Dimension of the numerical null space: columns - numerical rank.
template <typename Scalar>
Index null_space_dim(const CMatrix<Scalar>& channel,
                     Scalar tol = default_rank_tolerance<Scalar>) {
  return channel.cols() - singular_spectrum(channel, tol).numerical_rank;
}

// Whether projection is possible at all for the given antenna counts, plus the
// spare-dimension margin and the effective aperture of the configured
// subarray count.
struct FeasibilityReport {
  bool feasible{false};
  Index margin{0};              // num_tx - num_comms_rx
  Index effective_aperture{0};  // of the configured subarray count
};

inline FeasibilityReport nsp_feasibility(Index num_tx, Index num_comms_rx, Index num_subarrays) {
  require(num_tx >= 1 && num_comms_rx >= 1, "nsp_feasibility: antenna counts must be >= 1");
  FeasibilityReport report;
  report.feasible = num_tx > num_comms_rx;
  report.margin = num_tx - num_comms_rx;
  report.effective_aperture = effective_aperture(num_tx, num_subarrays);
  return report;
}

}  // namespace omimo

#endif  // OMIMO_NSP_HPP
