// SPDX-License-Identifier: Apache-2.0

#include "omimo/overlapped.hpp"

#include <doctest.h>

#include <random>

using namespace omimo;
using Cplx = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

TEST_CASE("partition sizes") {
  const auto p = make_partition(20, 5);
  CHECK(p.elements_per_subarray == 16);
  CHECK(p.num_channels() == 80);
  CHECK(p.physical_element(1, 1) == 0);
  CHECK(p.physical_element(16, 5) == 19);

  const auto phased = make_partition(9, 1);
  CHECK(phased.elements_per_subarray == 9);
  const auto mimo = make_partition(9, 9);
  CHECK(mimo.elements_per_subarray == 1);

  CHECK_THROWS_AS(make_partition(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_partition(5, 6), std::invalid_argument);
}

TEST_CASE("adjacent subarrays overlap in all but one element") {
  const auto p = make_partition(7, 3);
  for (Index k = 1; k < p.num_subarrays; ++k) {
    CHECK(p.physical_element(1, k + 1) == p.physical_element(1, k) + 1);
    CHECK(p.physical_element(p.elements_per_subarray, k + 1) ==
          p.physical_element(p.elements_per_subarray, k) + 1);
  }
}

TEST_CASE("transmit weights are unit norm with flat magnitude") {
  const auto p = make_partition(20, 5);
  const auto weights = transmit_weights(p, Angle<double>::from_degrees(15.0), 0.5);
  REQUIRE(weights.w.rows() == 16);
  REQUIRE(weights.w.cols() == 5);
  for (Index k = 0; k < weights.w.cols(); ++k) {
    CHECK(std::abs(weights.w.col(k).norm() - 1.0) < 1e-12);
    for (Index m = 0; m < weights.w.rows(); ++m) {
      CHECK(std::abs(std::abs(weights.w(m, k)) - 0.25) < 1e-12);
    }
  }
}

TEST_CASE("broadside weights are real and uniform") {
  const auto p = make_partition(10, 3);
  const auto weights = transmit_weights(p, Angle<double>(0.0), 0.5);
  const double expected = 1.0 / std::sqrt(8.0);
  CHECK((weights.w.array() - Cplx(expected, 0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("singleton subarrays get scalar unit weights") {
  const auto p = make_partition(6, 6);
  const auto weights = transmit_weights(p, Angle<double>::from_degrees(-40.0), 0.5);
  CHECK((weights.w.array() - Cplx(1, 0)).abs().maxCoeff() < 1e-12);
}

TEST_CASE("diversity vector carries one phase step per subarray") {
  SUBCASE("broadside and single-subarray cases are flat") {
    CHECK((diversity_vector(make_partition(8, 3), Angle<double>(0.0), 0.5).array() - Cplx(1, 0))
              .abs()
              .maxCoeff() < 1e-12);
    CHECK((diversity_vector(make_partition(8, 1), Angle<double>(0.9), 0.5).array() - Cplx(1, 0))
              .abs()
              .maxCoeff() < 1e-12);
  }
  SUBCASE("endfire half-wavelength steps alternate sign") {
    const auto p = make_partition(5, 3);
    const auto d = diversity_vector(p, Angle<double>(pi / 2), 0.5);
    REQUIRE(d.size() == 9);
    const Cplx expected[3] = {{1, 0}, {-1, 0}, {1, 0}};
    for (Index k = 1; k <= 3; ++k) {
      for (Index m = 1; m <= 3; ++m) {
        CHECK(std::abs(d(p.flat_index(m, k)) - expected[k - 1]) < 1e-12);
      }
    }
  }
}

TEST_CASE("weighted response is coherent at the steering direction") {
  const auto steer = Angle<double>::from_degrees(15.0);
  SUBCASE("singleton subarrays give unit entries") {
    const auto p = make_partition(6, 6);
    const auto weights = transmit_weights(p, steer, 0.5);
    const auto c = weighted_response_vector(p, weights, steer, 0.5);
    CHECK((c.array() - Cplx(1, 0)).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("broadside entries are 1/sqrt(M_m)") {
    const auto p = make_partition(12, 4);
    const auto weights = transmit_weights(p, Angle<double>(0.0), 0.5);
    const auto c = weighted_response_vector(p, weights, Angle<double>(0.0), 0.5);
    CHECK((c.array() - Cplx(1.0 / 3.0, 0)).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("per-subarray sums reach the coherent gain at steer, never beyond") {
    const auto p = make_partition(14, 4);
    const auto weights = transmit_weights(p, steer, 0.5);
    const double gain = std::sqrt(double(p.elements_per_subarray));
    const auto at_steer = weighted_response_vector(p, weights, steer, 0.5);
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> angle(-pi / 2, pi / 2);
    for (Index k = 1; k <= p.num_subarrays; ++k) {
      Cplx sum = 0;
      for (Index m = 1; m <= p.elements_per_subarray; ++m) sum += at_steer(p.flat_index(m, k));
      CHECK(std::abs(sum - gain) < 1e-12);
    }
    for (int trial = 0; trial < 20; ++trial) {
      const auto c = weighted_response_vector(p, weights, Angle<double>(angle(gen)), 0.5);
      for (Index k = 1; k <= p.num_subarrays; ++k) {
        Cplx sum = 0;
        for (Index m = 1; m <= p.elements_per_subarray; ++m) sum += c(p.flat_index(m, k));
        CHECK(std::abs(sum) <= gain + 1e-12);
      }
    }
  }
}

TEST_CASE("virtual steering composes Hadamard and Kronecker structure") {
  const auto steer = Angle<double>::from_degrees(15.0);
  const UniformLinearArray<double> rx(20, 0.5);

  SUBCASE("dimensions") {
    const auto p = make_partition(20, 5);
    const auto weights = transmit_weights(p, steer, 0.5);
    const auto vs = virtual_steering(p, weights, Angle<double>(0.2), 0.5, rx);
    CHECK(vs.u.size() == 1600);
    CHECK(vs.c.size() == 80);
    CHECK(vs.d.size() == 80);
    CHECK(vs.b.size() == 20);
  }
  SUBCASE("entrywise identity u = (c .* d) kron b") {
    const auto p = make_partition(9, 4);
    const auto weights = transmit_weights(p, steer, 0.5);
    const UniformLinearArray<double> small_rx(3, 0.45);
    const auto vs = virtual_steering(p, weights, Angle<double>(-0.4), 0.5, small_rx);
    for (Index ch = 0; ch < p.num_channels(); ++ch) {
      for (Index r = 0; r < small_rx.num_elements; ++r) {
        CHECK(std::abs(vs.u(ch * small_rx.num_elements + r) - vs.c(ch) * vs.d(ch) * vs.b(r)) <
              1e-14);
      }
    }
  }
  SUBCASE("full decomposition reduces to the physical virtual array") {
    const UniformLinearArray<double> tx(7, 0.5);
    const auto p = make_partition(7, 7);
    const auto weights = transmit_weights(p, steer, 0.5);
    const UniformLinearArray<double> rx4(4, 0.5);
    const auto theta = Angle<double>(0.33);
    const auto vs = virtual_steering(p, weights, theta, 0.5, rx4);
    const auto reference = virtual_steering_full_mimo(tx, rx4, theta);
    CHECK((vs.u - reference).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("beampattern is normalized, bounded and symmetric") {
  const UniformLinearArray<double> rx(12, 0.5);
  const auto p = make_partition(12, 4);
  const auto steer = Angle<double>::from_degrees(15.0);
  const auto weights = transmit_weights(p, steer, 0.5);

  CHECK(beampattern(p, weights, steer, steer, 0.5, rx) == doctest::Approx(1.0).epsilon(1e-12));

  for (double deg = -90.0; deg <= 90.0; deg += 1.0) {
    const double g =
        beampattern(p, weights, steer, Angle<double>::from_degrees(deg), 0.5, rx);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0 + 1e-12);
  }

  const auto broadside = transmit_weights(p, Angle<double>(0.0), 0.5);
  for (double deg = 0.5; deg <= 90.0; deg += 1.5) {
    const double right =
        beampattern(p, broadside, Angle<double>(0.0), Angle<double>::from_degrees(deg), 0.5, rx);
    const double left =
        beampattern(p, broadside, Angle<double>(0.0), Angle<double>::from_degrees(-deg), 0.5, rx);
    CHECK(std::abs(right - left) < 1e-10);
  }
}

TEST_CASE("single-subarray and fully-split patterns coincide") {
  const Index num_elements = 12;
  const UniformLinearArray<double> rx(num_elements, 0.5);
  const auto steer = Angle<double>::from_degrees(10.0);
  const auto one = make_partition(num_elements, 1);
  const auto full = make_partition(num_elements, num_elements);
  const auto w_one = transmit_weights(one, steer, 0.5);
  const auto w_full = transmit_weights(full, steer, 0.5);
  double worst = 0;
  for (double deg = -90.0; deg <= 90.0; deg += 0.5) {
    const auto theta = Angle<double>::from_degrees(deg);
    worst = std::max(worst, std::abs(beampattern(one, w_one, steer, theta, 0.5, rx) -
                                     beampattern(full, w_full, steer, theta, 0.5, rx)));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("closed form matches the generic pattern") {
  std::mt19937 gen(17);
  std::uniform_int_distribution<int> tx_count(1, 8);
  std::uniform_int_distribution<int> rx_count(1, 8);
  std::uniform_real_distribution<double> spacing(0.1, 1.0);
  std::uniform_real_distribution<double> steer_deg(-75.0, 75.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Index mt = tx_count(gen);
    std::uniform_int_distribution<Index> subarrays(1, mt);
    const auto p = make_partition(mt, subarrays(gen));
    const double dt = spacing(gen);
    const UniformLinearArray<double> rx(rx_count(gen), spacing(gen));
    const auto steer = Angle<double>::from_degrees(steer_deg(gen));
    const auto weights = transmit_weights(p, steer, dt);
    for (double deg = -90.0; deg <= 90.0; deg += 2.0) {
      const auto theta = Angle<double>::from_degrees(deg);
      const double generic = beampattern(p, weights, steer, theta, dt, rx);
      const double closed = beampattern_ula_closed_form(p, steer, theta, dt, rx);
      CHECK(std::abs(generic - closed) < 1e-9);
    }
  }
}

TEST_CASE("closed form collapses to the two-factor product for one subarray") {
  const auto p = make_partition(6, 1);
  const UniformLinearArray<double> tx(6, 0.5);
  const UniformLinearArray<double> rx(5, 0.5);
  const auto steer = Angle<double>::from_degrees(20.0);
  const auto a_ref = steering_vector(tx, steer);
  const auto b_ref = steering_vector(rx, steer);
  for (double deg = -90.0; deg <= 90.0; deg += 3.0) {
    const auto theta = Angle<double>::from_degrees(deg);
    const double expected =
        std::norm(a_ref.dot(steering_vector(tx, theta))) *
        std::norm(b_ref.dot(steering_vector(rx, theta))) /
        (std::pow(a_ref.squaredNorm(), 2) * std::pow(b_ref.squaredNorm(), 2));
    CHECK(std::abs(beampattern_ula_closed_form(p, steer, theta, 0.5, rx) - expected) < 1e-12);
  }
}

TEST_CASE("effective aperture and its maximizer") {
  CHECK(effective_aperture(20, 5) == 80);
  CHECK(effective_aperture(20, 10) == 110);
  CHECK(effective_aperture(9, 1) == 9);
  CHECK(effective_aperture(9, 9) == 9);
  CHECK_THROWS_AS(effective_aperture(4, 5), std::invalid_argument);
  CHECK_THROWS_AS(effective_aperture(4, 0), std::invalid_argument);

  CHECK(optimal_subarrays(1) == 1);
  CHECK(optimal_subarrays(15) == 8);
  CHECK(effective_aperture(15, 8) == 64);
  CHECK(optimal_subarrays(20) == 10);
  CHECK(effective_aperture(20, 10) == effective_aperture(20, 11));

  // exhaustive check that the formula always lands in the argmax set
  for (Index mt = 1; mt <= 64; ++mt) {
    Index best = 0;
    for (Index k = 1; k <= mt; ++k) best = std::max(best, effective_aperture(mt, k));
    CHECK(effective_aperture(mt, optimal_subarrays(mt)) == best);
  }
}

TEST_CASE("mixing matrix structure") {
  const auto steer = Angle<double>::from_degrees(15.0);

  SUBCASE("three elements, two subarrays touch the documented rows") {
    const auto p = make_partition(3, 2);
    const auto weights = transmit_weights(p, steer, 0.5);
    const auto mixing = build_mixing_matrix(p, weights);
    REQUIRE(mixing.rows() == 3);
    REQUIRE(mixing.cols() == 4);
    // columns in flat order: (m=1,k=1),(m=2,k=1),(m=1,k=2),(m=2,k=2)
    CHECK(std::abs(mixing(0, 0)) > 0);
    CHECK(std::abs(mixing(1, 1)) > 0);
    CHECK(std::abs(mixing(1, 2)) > 0);
    CHECK(std::abs(mixing(2, 3)) > 0);
    Index nonzeros = 0;
    for (Index r = 0; r < 3; ++r) {
      for (Index c = 0; c < 4; ++c) nonzeros += std::abs(mixing(r, c)) > 0 ? 1 : 0;
    }
    CHECK(nonzeros == 4);
  }
  SUBCASE("column norms carry the per-subarray power scaling") {
    const auto p = make_partition(11, 4);
    const auto weights = transmit_weights(p, steer, 0.5);
    const auto mixing = build_mixing_matrix(p, weights);
    const double gain = std::sqrt(11.0 / 4.0);
    for (Index k = 1; k <= p.num_subarrays; ++k) {
      for (Index m = 1; m <= p.elements_per_subarray; ++m) {
        const double expected = gain * std::abs(weights.w(m - 1, k - 1));
        CHECK(std::abs(mixing.col(p.flat_index(m, k)).norm() - expected) < 1e-12);
      }
    }
  }
  SUBCASE("fully-split array yields the identity map") {
    const auto p = make_partition(5, 5);
    const auto weights = transmit_weights(p, steer, 0.5);
    const auto mixing = build_mixing_matrix(p, weights);
    CHECK((mixing - CMatrix<double>::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("adjoint of the mixing matrix reproduces the virtual transmit phases") {
    std::mt19937 gen(23);
    std::uniform_real_distribution<double> angle(-pi / 2, pi / 2);
    const auto p = make_partition(13, 6);
    const auto weights = transmit_weights(p, steer, 0.5);
    const auto mixing = build_mixing_matrix(p, weights);
    const UniformLinearArray<double> tx(13, 0.5);
    const double gain = std::sqrt(13.0 / 6.0);
    for (int trial = 0; trial < 20; ++trial) {
      const auto theta = Angle<double>(angle(gen));
      const CVector<double> lhs = mixing.adjoint() * steering_vector(tx, theta);
      const CVector<double> rhs =
          gain * weighted_response_vector(p, weights, theta, 0.5)
                     .cwiseProduct(diversity_vector(p, theta, 0.5));
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}
