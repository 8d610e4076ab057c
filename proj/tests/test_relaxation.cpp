#include "test_support.hpp"

#include "qpoc/oracle.hpp"
#include "qpoc/popsolve.hpp"
#include "qpoc/relaxation.hpp"

#include <doctest.h>

#include <random>

using namespace qpoc;
using namespace qpoc::test;

namespace {

PopProblem univariate(const std::vector<double>& coeffs) {
  PopProblem p{Variables::numbered("x", 1), {}, {}};
  p.objective = RealPolynomial(p.variables);
  const auto x = variable(p.variables, 0);
  RealPolynomial power = real_constant(p.variables, 1.0);
  for (double c : coeffs) {
    p.objective = p.objective + power.scaled(c);
    power = power * x;
  }
  return p;
}

/// (x^2 - 1)^2
PopProblem double_well() { return univariate({1.0, 0.0, -2.0, 0.0, 1.0}); }

/// Dense grid minimum over [-lo, lo].
double grid_minimum(const PopProblem& p, double half_width, int points) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= points; ++i) {
    const double x = -half_width + 2.0 * half_width * i / points;
    best = std::min(best, p.objective_at(std::vector<double>{x}));
  }
  return best;
}

PopProblem coherent_problem(const std::vector<double>& x_star) {
  const auto sys = three_level();
  const auto ansatz = ControlAnsatz::fixed(3, 0.5);
  return gate_objective(sys, ansatz, GateTarget(propagate(sys, ansatz, x_star).unitary));
}

}  // namespace

TEST_SUITE("relaxation") {
  TEST_CASE("moment matrix structure at d = 1") {
    PopProblem p{Variables::numbered("x", 2), {}, {}};
    const auto x1 = variable(p.variables, 0);
    const auto x2 = variable(p.variables, 1);
    p.objective = x1 * x1 + x2 * x2;
    const auto rel = build_relaxation(p, 1);
    CHECK(rel.basis.size() == 3);
    CHECK(rel.moments.size() == 6);
    REQUIRE(rel.blocks.size() == 1);
    CHECK(rel.blocks[0].constraint == -1);
    CHECK(rel.blocks[0].size == 3);
    CHECK(rel.sdp.constraints() == 5);

    Eigen::VectorXd y(6);
    y << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
    const Eigen::MatrixXd m = rel.moment_matrix(y);
    Eigen::MatrixXd expected(3, 3);
    expected << 1, 2, 3, 2, 4, 5, 3, 5, 6;
    CHECK((m - expected).norm() == 0.0);
  }

  TEST_CASE("order validation and localizing blocks") {
    CHECK(minimal_relaxation_order(double_well()) == 2);
    CHECK_THROWS_AS(build_relaxation(double_well(), 1), std::invalid_argument);

    auto p = univariate({0.0, 1.0});
    p.constraints.push_back(univariate({1.0, 0.0, -1.0}).objective);
    CHECK(minimal_relaxation_order(p) == 1);
    const auto rel = build_relaxation(p, 2);
    REQUIRE(rel.blocks.size() == 2);
    CHECK(rel.blocks[1].constraint == 0);
    CHECK(rel.blocks[1].basis_degree == 1);
    CHECK(rel.blocks[1].size == 2);
  }

  TEST_CASE("double well: bound 0, heuristic extraction, refinement to a minimizer") {
    const auto p = double_well();
    const auto rel = build_relaxation(p, 2);
    const auto sol = solve_sdp(rel.sdp);
    REQUIRE(sol.optimal());
    const double bound = rel.lower_bound(sol);
    CHECK(std::abs(bound - grid_minimum(p, 2.0, 40000)) < 1e-6);
    const auto ex = extract_minimizer(rel, sol);
    // Two symmetric minimizers: the moment matrix has rank two.
    CHECK_FALSE(ex.rank_one);
    CHECK(ex.numerical_rank == 2);
    CHECK(std::abs(ex.point[0]) < 1e-3);

    SolveOptions opts;
    opts.multistart = 0;
    const auto report = solve(p, opts);
    REQUIRE(report.relaxation);
    CHECK(std::abs(std::abs(report.solution.point[0]) - 1.0) < 1e-6);
    CHECK(report.solution.value < 1e-10);
  }

  TEST_CASE("shifted square: rank-one extraction recovers the minimizer") {
    const auto p = univariate({0.09, -0.6, 1.0});
    const auto rel = build_relaxation(p, 1);
    const auto sol = solve_sdp(rel.sdp);
    REQUIRE(sol.optimal());
    const auto ex = extract_minimizer(rel, sol);
    CHECK(ex.rank_one);
    CHECK(std::abs(ex.point[0] - 0.3) < 1e-6);
    CHECK(std::abs(rel.lower_bound(sol)) < 1e-6);
  }

  TEST_CASE("constrained: min x s.t. 1 - x^2 >= 0") {
    auto p = univariate({0.0, 1.0});
    p.constraints.push_back(univariate({1.0, 0.0, -1.0}).objective);
    const auto report = solve(p, SolveOptions{});
    REQUIRE(report.relaxation);
    CHECK(std::abs(report.lower_bound() + 1.0) < 1e-6);
    CHECK(report.solution.feasible);
    CHECK(std::abs(report.solution.value + 1.0) < 1e-4);
  }

  TEST_CASE("property: bound soundness, monotonicity in d, PSD moments") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      PopProblem p{Variables::numbered("x", 2), {}, {}};
      const auto x1 = variable(p.variables, 0);
      const auto x2 = variable(p.variables, 1);
      RealPolynomial f = x1 * x1 * x1 * x1 + x2 * x2 * x2 * x2;
      for (const auto& m : monomials_up_to(2, 3)) f = f + RealPolynomial::from_terms(p.variables, 0, {{m, u(rng)}});
      p.objective = f;

      double previous = -std::numeric_limits<double>::infinity();
      for (int d : {2, 3}) {
        const auto rel = build_relaxation(p, d);
        const auto sol = solve_sdp(rel.sdp);
        REQUIRE(sol.optimal());
        const double bound = rel.lower_bound(sol);
        CHECK(bound >= previous - 1e-7);
        previous = bound;
        const Eigen::MatrixXd m = rel.moment_matrix(rel.pseudo_moments(sol));
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff() > -1e-7);
        for (int k = 0; k < 100; ++k) CHECK(bound <= p.objective_at(random_point(rng, 2, 2.0)) + 1e-7);
      }
    }
  }

  TEST_CASE("property: solve is deterministic") {
    const auto p = coherent_problem({0.2, 0.1, -0.3});
    const auto a = solve(p, SolveOptions{});
    const auto b = solve(p, SolveOptions{});
    CHECK(a.solution.point == b.solution.point);
    CHECK(a.lower_bound() == b.lower_bound());
  }

  TEST_CASE("gate synthesis end to end") {
    const std::vector<double> x_star{0.4, -0.6, 0.3};
    const auto sys = three_level();
    const auto ansatz = ControlAnsatz::fixed(3, 0.5);
    const Eigen::MatrixXcd target = propagate(sys, ansatz, x_star).unitary;
    const auto p = coherent_problem(x_star);
    const auto report = solve(p, SolveOptions{});
    REQUIRE(report.relaxation);
    CHECK(report.lower_bound() <= p.objective_at(x_star) + 1e-6);
    CHECK(report.lower_bound() <= report.solution.value + 1e-6);
    const double residual = std::sqrt(frob_distance_sq(propagate(sys, ansatz, report.solution.point).unitary, target));
    CHECK(residual < 1e-4);
    REQUIRE(report.multistart);
    CHECK(report.multistart->best.value - report.lower_bound() < 1e-3);
  }
}
