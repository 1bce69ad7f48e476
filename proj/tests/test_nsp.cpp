// SPDX-License-Identifier: Apache-2.0

#include "omimo/nsp.hpp"

#include "omimo/rng.hpp"
#include "omimo/scenario.hpp"

#include <doctest.h>

using namespace omimo;
using Cplx = std::complex<double>;

namespace {

Eigen::MatrixXcd random_channel(Index rows, Index cols, std::uint64_t seed) {
  RandomStream rng(seed);
  return sample_channel(rows, cols, rng);
}

}  // namespace

TEST_CASE("zero channel projects onto everything") {
  const auto proj = null_space_projection<double>(Eigen::MatrixXcd::Zero(4, 8));
  CHECK(proj.rank == 8);
  CHECK((proj.p - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("invertible square channel has a trivial null space") {
  const Eigen::MatrixXcd h = random_channel(8, 8, 99);
  REQUIRE(singular_spectrum(h).values.minCoeff() > 1e-6);  // generic full rank
  const auto proj = null_space_projection(h);
  CHECK(proj.rank == 0);
  CHECK(proj.p.norm() == 0.0);
}

TEST_CASE("wide random channel leaves the expected null space") {
  const Eigen::MatrixXcd h = random_channel(4, 20, 1234);
  const auto proj = null_space_projection(h);
  CHECK(proj.rank == 16);
  CHECK((h * proj.p).norm() / h.norm() < 1e-10);
  CHECK((proj.p * proj.p - proj.p).norm() < 1e-10);
  CHECK((proj.p - proj.p.adjoint()).norm() < 1e-10);
}

TEST_CASE("projector properties hold over many seeded draws") {
  const Index shapes[][2] = {{2, 8}, {4, 20}, {7, 9}, {9, 7}};
  for (const auto& shape : shapes) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Eigen::MatrixXcd h = random_channel(shape[0], shape[1], 1000 + seed);
      const auto proj = null_space_projection(h);
      CHECK((h * proj.p).norm() <= 1e-10 * std::max(1.0, h.norm()));
      CHECK((proj.p * proj.p - proj.p).norm() <= 1e-10);
      CHECK((proj.p - proj.p.adjoint()).norm() <= 1e-10 * std::max(1.0, proj.p.norm()));
      CHECK(proj.rank == shape[1] - std::min(shape[0], shape[1]));
    }
  }
}

TEST_CASE("projection leaves null-space signals untouched and kills row-space signals") {
  const Eigen::MatrixXcd h = random_channel(5, 12, 77);
  const auto proj = null_space_projection(h);
  RandomStream rng(4321);

  CVector<double> y(12);
  for (Index i = 0; i < y.size(); ++i) y(i) = rng.complex_gaussian();

  const CVector<double> in_null = project_signal(proj, y);
  CHECK((project_signal(proj, in_null) - in_null).cwiseAbs().maxCoeff() < 1e-10);

  CVector<double> z(5);
  for (Index i = 0; i < z.size(); ++i) z(i) = rng.complex_gaussian();
  const CVector<double> in_row = h.adjoint() * z;
  CHECK(project_signal(proj, in_row).norm() <= 1e-10 * in_row.norm());
}

TEST_CASE("identity projector passes signals through exactly") {
  const auto proj = null_space_projection<double>(Eigen::MatrixXcd::Zero(3, 6));
  CVector<double> x(6);
  x << Cplx(1, 2), Cplx(-3, 0.5), Cplx(0, 0), Cplx(4, -4), Cplx(0.25, 0), Cplx(0, -1);
  CHECK((project_signal(proj, x) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projection is orthogonal") {
  const Eigen::MatrixXcd h = random_channel(3, 10, 2024);
  const auto proj = null_space_projection(h);
  RandomStream rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    CVector<double> x(10);
    for (Index i = 0; i < x.size(); ++i) x(i) = rng.complex_gaussian();
    const CVector<double> px = project_signal(proj, x);
    const Cplx overlap = (x - px).dot(px);
    CHECK(std::abs(overlap) <= 1e-10 * x.squaredNorm());
  }
}

TEST_CASE("per-sample matrices project column by column") {
  const Eigen::MatrixXcd h = random_channel(2, 6, 8);
  const auto proj = null_space_projection(h);
  RandomStream rng(9);
  CMatrix<double> samples(6, 5);
  for (Index r = 0; r < 6; ++r) {
    for (Index c = 0; c < 5; ++c) samples(r, c) = rng.complex_gaussian();
  }
  const CMatrix<double> projected = project_signal(proj, samples);
  for (Index c = 0; c < 5; ++c) {
    CHECK((projected.col(c) - project_signal(proj, CVector<double>(samples.col(c))))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
  CHECK((h * projected).norm() <= 1e-8 * h.norm() * samples.norm());
}

TEST_CASE("null space dimension tracks the channel rank") {
  CHECK(null_space_dim(random_channel(4, 20, 31)) == 16);
  CHECK(null_space_dim(random_channel(20, 20, 32)) == 0);
  CHECK(null_space_dim(random_channel(21, 20, 33)) == 0);

  Eigen::MatrixXcd repeated = random_channel(4, 20, 34);
  repeated.row(3) = repeated.row(2);  // rank drops to 3
  CHECK(null_space_dim(repeated) == 17);
}

TEST_CASE("numerical rank is monotone in the tolerance") {
  // channel with well-separated singular values 1, 1e-2, ..., 1e-10
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(6, 6);
  for (Index i = 0; i < 6; ++i) h(i, i) = std::pow(10.0, -2.0 * double(i));
  Index previous_rank = 0;
  for (double tol : {1e-15, 1e-9, 1e-7, 1e-3, 1e-1, 0.5}) {
    const auto proj = null_space_projection(h, tol);
    CHECK(proj.rank >= previous_rank);
    previous_rank = proj.rank;
  }
  CHECK(null_space_projection(h, 1e-15).rank == 0);
  CHECK(null_space_projection(h, 0.5).rank == 5);
}

TEST_CASE("non-finite channels are rejected") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 3);
  h(1, 2) = Cplx(std::numeric_limits<double>::quiet_NaN(), 0);
  CHECK_THROWS_AS(null_space_projection(h), std::invalid_argument);
  CHECK_THROWS_AS(singular_spectrum(h), std::invalid_argument);
}

TEST_CASE("dimension mismatches are rejected") {
  const auto proj = null_space_projection(random_channel(2, 5, 3));
  CHECK_THROWS_AS(project_signal(proj, CVector<double>(CVector<double>::Zero(4))),
                  std::invalid_argument);
}

TEST_CASE("feasibility compares antenna counts") {
  const auto wide = nsp_feasibility(20, 4, 5);
  CHECK(wide.feasible);
  CHECK(wide.margin == 16);
  CHECK(wide.effective_aperture == 80);

  CHECK_FALSE(nsp_feasibility(4, 4, 2).feasible);

  const auto tight = nsp_feasibility(20, 19, 10);
  CHECK(tight.feasible);
  CHECK(tight.margin == 1);
  CHECK(tight.effective_aperture == 110);
}
