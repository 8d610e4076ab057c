#include "test_support.hpp"

#include "qpoc/polyalg.hpp"

#include <doctest.h>

#include <random>

using namespace qpoc;
using qpoc::test::random_point;

namespace {

Variables xy() { return Variables::numbered("x", 2); }

ComplexMatrixPolynomial random_matrix_poly(std::mt19937_64& rng, const Variables& vars, int dim, int degree) {
  std::vector<ComplexMatrixPolynomial::Term> terms;
  for (const auto& m : monomials_up_to(vars.size(), degree)) {
    terms.emplace_back(m, qpoc::test::random_matrix(rng, dim));
  }
  return ComplexMatrixPolynomial::from_terms(vars, dim, std::move(terms));
}

RealPolynomial random_real_poly(std::mt19937_64& rng, const Variables& vars, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<RealPolynomial::Term> terms;
  for (const auto& m : monomials_up_to(vars.size(), degree)) terms.emplace_back(m, u(rng));
  return RealPolynomial::from_terms(vars, 0, std::move(terms));
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_SUITE("polyalg") {
  TEST_CASE("monomials use graded lexicographic order") {
    const auto ms = monomials_up_to(2, 2);
    REQUIRE(ms.size() == 6);
    CHECK(ms[0].is_constant());
    CHECK(ms[1] == Monomial::unit(0));
    CHECK(ms[2] == Monomial::unit(1));
    CHECK(ms[3] == Monomial::unit(0, 2));
    CHECK(ms[4] == Monomial::unit(0) * Monomial::unit(1));
    CHECK(ms[5] == Monomial::unit(1, 2));
    CHECK(monomials_up_to(3, 5).size() == 56);
  }

  TEST_CASE("variables reject duplicates and overflow") {
    CHECK_THROWS_AS(Variables({"a", "a"}), std::invalid_argument);
    CHECK_THROWS_AS(Variables::numbered("x", 9), std::invalid_argument);
    CHECK(xy().require("x2") == 1);
    CHECK_THROWS_AS(xy().require("y"), std::invalid_argument);
  }

  TEST_CASE("add: coefficients, identity, cancellation") {
    const auto vars = xy();
    const auto x1 = variable(vars, 0);
    const auto sum = x1 + x1;
    REQUIRE(sum.size() == 1);
    CHECK(sum.coefficient(Monomial::unit(0)) == 2.0);
    CHECK((x1 + RealPolynomial(vars)).identical(x1));

    const Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(3, 3);
    const auto p = matrix_term(vars, Monomial::unit(0), m);
    const auto q = matrix_term(vars, Monomial::unit(0), -m);
    CHECK((p + q).empty());
  }

  TEST_CASE("add rejects mismatched variable sets and dimensions") {
    const auto a = variable(xy(), 0);
    const auto b = variable(Variables::numbered("z", 2), 0);
    CHECK_THROWS_AS(a + b, std::invalid_argument);
    const auto p = matrix_term(xy(), Monomial{}, Eigen::MatrixXcd::Identity(2, 2));
    const auto q = matrix_term(xy(), Monomial{}, Eigen::MatrixXcd::Identity(3, 3));
    CHECK_THROWS_AS(p + q, std::invalid_argument);
    CHECK_THROWS_AS(p * q, std::invalid_argument);
  }

  TEST_CASE("mul: monomials, ordered matrix products, difference of squares") {
    const auto vars = xy();
    const auto x1 = variable(vars, 0);
    const auto x2 = variable(vars, 1);
    const auto prod = x1 * x2;
    REQUIRE(prod.size() == 1);
    CHECK(prod.coefficient(Monomial::unit(0) * Monomial::unit(1)) == 1.0);

    Eigen::MatrixXcd m1(2, 2), m2(2, 2);
    m1 << 0, 1, 0, 0;
    m2 << 0, 0, 1, 0;
    const auto p = matrix_term(vars, Monomial::unit(0), m1) * matrix_term(vars, Monomial::unit(0), m2);
    REQUIRE(p.size() == 1);
    CHECK((p.coefficient(Monomial::unit(0, 2)) - m1 * m2).norm() == 0.0);
    CHECK((m1 * m2 - m2 * m1).norm() > 0.0);

    const auto one = real_constant(vars, 1.0);
    const auto d = (one + x1) * (one - x1);
    CHECK(d.identical(one - x1 * x1));
    CHECK(d.degree() == 2);
  }

  TEST_CASE("conj_transpose examples") {
    const auto vars = xy();
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(2, 2);
    const auto p = conj_transpose(matrix_term(vars, Monomial::unit(0), kI * eye));
    CHECK((p.coefficient(Monomial::unit(0)) + kI * eye).norm() == 0.0);

    Eigen::MatrixXcd h(2, 2);
    h << 1.0, Complex(2.0, -1.0), Complex(2.0, 1.0), -3.0;
    const auto ph = matrix_term(vars, Monomial::unit(0), h);
    CHECK(conj_transpose(ph).identical(ph));

    const auto omega = matrix_term(vars, Monomial::unit(1), kI * h);
    CHECK(conj_transpose(omega).identical(-omega));
  }

  TEST_CASE("frobenius_square examples") {
    const auto vars = xy();
    Eigen::MatrixXcd e11 = Eigen::MatrixXcd::Zero(2, 2), e22 = Eigen::MatrixXcd::Zero(2, 2);
    e11(0, 0) = 1.0;
    e22(1, 1) = kI;
    const auto m = matrix_term(vars, Monomial::unit(0), e11) + matrix_term(vars, Monomial::unit(1), e22);
    const auto x1 = variable(vars, 0);
    const auto x2 = variable(vars, 1);
    CHECK(frobenius_square(m).identical(x1 * x1 + x2 * x2));

    const auto id = ComplexMatrixPolynomial::constant(vars, Eigen::MatrixXcd::Identity(3, 3));
    const auto f = frobenius_square(id);
    REQUIRE(f.size() == 1);
    CHECK(f.coefficient(Monomial{}) == doctest::Approx(3.0).epsilon(1e-15));
  }

  TEST_CASE("frobenius_square of a random cubic matches the pointwise norm") {
    std::mt19937_64 rng(11);
    const auto vars = Variables::numbered("x", 3);
    const auto m = random_matrix_poly(rng, vars, 3, 3);
    const auto f = frobenius_square(m);
    for (int k = 0; k < 20; ++k) {
      const auto x = random_point(rng, 3, 1.5);
      const double direct = m.evaluate(x).squaredNorm();
      CHECK(rel_err(f.evaluate(x), direct) < 1e-12);
      CHECK(f.evaluate(x) >= -1e-12);
    }
  }

  TEST_CASE("differentiate examples and finite differences") {
    const auto vars = xy();
    const auto x1 = variable(vars, 0);
    const auto x2 = variable(vars, 1);
    CHECK(differentiate(x1 * x1 + x2 * x2, 0).identical(x1.scaled(2.0)));
    CHECK(differentiate(real_constant(vars, 5.0), "x1").empty());
    CHECK_THROWS_AS(differentiate(x1, "y"), std::invalid_argument);
    CHECK_THROWS_AS(differentiate(x1, 2), std::invalid_argument);

    std::mt19937_64 rng(5);
    const auto p = random_real_poly(rng, vars, 5);
    const double h = 1e-5;
    for (int k = 0; k < 10; ++k) {
      const auto x = random_point(rng, 2, 1.0);
      for (std::size_t v = 0; v < 2; ++v) {
        auto xp = x, xm = x;
        xp[v] += h;
        xm[v] -= h;
        const double fd = (p.evaluate(xp) - p.evaluate(xm)) / (2 * h);
        const double exact = differentiate(p, v).evaluate(x);
        CHECK(std::abs(fd - exact) / std::max(1.0, std::abs(exact)) < 1e-6);
      }
    }
  }

  TEST_CASE("evaluate examples") {
    const auto vars = xy();
    const std::vector<double> pt{2.0, 3.0};
    CHECK((variable(vars, 0) * variable(vars, 1)).evaluate(pt) == 6.0);
    CHECK(RealPolynomial(vars).evaluate(pt) == 0.0);
    CHECK(ComplexMatrixPolynomial(vars, 2).evaluate(pt).norm() == 0.0);
    CHECK_THROWS_AS(variable(vars, 0).evaluate(std::vector<double>{1.0}), std::invalid_argument);
  }

  TEST_CASE("prune threshold drops tiny coefficients") {
    const auto vars = xy();
    const auto x1 = variable(vars, 0);
    CHECK((x1.scaled(1e-15)).empty());
    CHECK((x1.scaled(1e-13)).size() == 1);
  }

  TEST_CASE("property: associativity and distributivity") {
    std::mt19937_64 rng(21);
    const auto vars = Variables::numbered("x", 2);
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = random_matrix_poly(rng, vars, 2, 2);
      const auto b = random_matrix_poly(rng, vars, 2, 2);
      const auto c = random_matrix_poly(rng, vars, 2, 1);
      const auto x = random_point(rng, 2, 1.0);
      const Eigen::MatrixXcd l1 = ((a * b) * c).evaluate(x);
      const Eigen::MatrixXcd r1 = (a * (b * c)).evaluate(x);
      CHECK((l1 - r1).norm() / std::max(1.0, l1.norm()) < 1e-12);
      const Eigen::MatrixXcd l2 = (a * (b + c)).evaluate(x);
      const Eigen::MatrixXcd r2 = (a * b + a * c).evaluate(x);
      CHECK((l2 - r2).norm() / std::max(1.0, l2.norm()) < 1e-12);
    }
  }

  TEST_CASE("property: conj_transpose is an involution") {
    std::mt19937_64 rng(3);
    const auto p = random_matrix_poly(rng, Variables::numbered("x", 3), 3, 3);
    CHECK(conj_transpose(conj_transpose(p)).identical(p));
  }
}
