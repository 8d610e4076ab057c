#include "test_support.hpp"

#include "qpoc/linalg.hpp"
#include "qpoc/oracle.hpp"

#include <doctest.h>

#include <random>

using namespace qpoc;
using namespace qpoc::test;

namespace {

double elementwise_sq(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) s += std::norm(a(i, j) - b(i, j));
  }
  return s;
}

Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_matrix(rng, n));
  return qr.householderQ();
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("zero control reproduces exp(-i T H0)") {
    const auto sys = three_level();
    const std::vector<double> zero(3, 0.0);
    for (int steps : {1, 7, 2000}) {
      const auto r = propagate(sys, ControlAnsatz::fixed(3, 0.5), zero, steps);
      const Eigen::MatrixXcd exact = expm_antihermitian(-kI * 0.5 * sys.drift());
      CHECK((r.unitary - exact).norm() < 1e-13);
      CHECK(r.steps == steps);
    }
    CHECK_THROWS_AS(propagate(sys, ControlAnsatz::fixed(3, 0.5), zero, 0), std::invalid_argument);
  }

  TEST_CASE("self-convergence and unitarity") {
    // Second-order stepping: U_2000 - U_4000 is 3/4 of the 2000-step error, which is
    // a few 1e-9 on [-1, 1]^3 and well below every tolerance downstream.
    const auto sys = three_level();
    const auto ansatz = ControlAnsatz::fixed(3, 0.5);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 5; ++k) {
      const auto x = random_point(rng, 3, 1.0);
      const auto a = propagate(sys, ansatz, x, 2000);
      const auto b = propagate(sys, ansatz, x, 4000);
      const Eigen::MatrixXcd ref = propagate(sys, ansatz, x, 32000).unitary;
      const double diff = (a.unitary - b.unitary).norm();
      const double err = (a.unitary - ref).norm();
      CHECK(diff < 5e-9);
      CHECK(err < 5e-9);
      CHECK(diff == doctest::Approx(0.75 * err).epsilon(0.02));
      CHECK(a.unitarity_defect < 1e-12);
      CHECK(b.unitarity_defect < 1e-12);
    }
  }

  TEST_CASE("property: midpoint stepping converges at second order") {
    const auto sys = three_level();
    const auto ansatz = ControlAnsatz::fixed(3, 0.5);
    const std::vector<double> x{0.9, -0.8, 0.7};
    const Eigen::MatrixXcd ref = propagate(sys, ansatz, x, 20000).unitary;
    const double e1 = (propagate(sys, ansatz, x, 50).unitary - ref).norm();
    const double e2 = (propagate(sys, ansatz, x, 100).unitary - ref).norm();
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("frob_distance_sq examples") {
    std::mt19937_64 rng(6);
    const Eigen::MatrixXcd u = random_unitary(rng, 3);
    CHECK(frob_distance_sq(u, u) == 0.0);
    CHECK(frob_distance_sq(u, -u) == doctest::Approx(12.0).epsilon(1e-14));
    const Eigen::MatrixXcd v = random_unitary(rng, 3);
    CHECK(std::abs(frob_distance_sq(u, v) - elementwise_sq(u, v)) < 1e-14);
    CHECK_THROWS_AS(frob_distance_sq(u, Eigen::MatrixXcd::Identity(2, 2)), std::invalid_argument);
  }

  TEST_CASE("state_distance_sq examples") {
    std::mt19937_64 rng(8);
    const Eigen::MatrixXcd u = random_unitary(rng, 3);
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(3), e1 = Eigen::VectorXcd::Zero(3);
    e0(0) = 1.0;
    e1(1) = 1.0;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
    CHECK(state_distance_sq(id, e0, e0) == 0.0);
    CHECK(state_distance_sq(id, e0, e1) == doctest::Approx(2.0).epsilon(1e-15));
    const Eigen::VectorXcd target = random_unitary(rng, 3).col(0);
    const Eigen::VectorXcd diff = u * e0 - target;
    double s = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i) s += std::norm(diff(i));
    CHECK(std::abs(state_distance_sq(u, e0, target) - s) < 1e-14);
  }

  TEST_CASE("property: manufactured target is reproduced") {
    const auto sys = three_level();
    const auto ansatz = ControlAnsatz::fixed(3, 0.5);
    const std::vector<double> x{0.2, 0.5, -0.4};
    const Eigen::MatrixXcd target = propagate(sys, ansatz, x, 8000).unitary;
    CHECK(frob_distance_sq(propagate(sys, ansatz, x).unitary, target) < 1e-8);
  }
}
