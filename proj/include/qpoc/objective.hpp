#pragma once

#include "qpoc/chebexp.hpp"
#include "qpoc/magnus.hpp"
#include "qpoc/polyalg.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace qpoc {

/// Target unitary U*.
class GateTarget {
 public:
  explicit GateTarget(Eigen::MatrixXcd unitary);
  const Eigen::MatrixXcd& unitary() const { return unitary_; }

 private:
  Eigen::MatrixXcd unitary_;
};

/// Initial state psi(0) and desired final state psi*(T), both unit vectors.
class StatePair {
 public:
  StatePair(Eigen::VectorXcd initial, Eigen::VectorXcd target);
  const Eigen::VectorXcd& initial() const { return initial_; }
  const Eigen::VectorXcd& target() const { return target_; }

 private:
  Eigen::VectorXcd initial_;
  Eigen::VectorXcd target_;
};

/// Unknown coupling z_index placed at (row, col) and (col, row).
struct CouplingEntry {
  int row = 0;
  int col = 0;
  int index = 0;
};

/// V(z) = V_fixed + sum_q z_q P_q, Hermitian for every real z.
class CouplingPattern {
 public:
  CouplingPattern(Eigen::Index dim, std::vector<CouplingEntry> entries,
                  Eigen::MatrixXcd fixed = Eigen::MatrixXcd());

  Eigen::Index dim() const { return dim_; }
  int unknowns() const { return unknowns_; }
  const std::vector<CouplingEntry>& entries() const { return entries_; }
  const Eigen::MatrixXcd& fixed() const { return fixed_; }

  /// P_q, the symmetric indicator matrix of unknown q.
  Eigen::MatrixXcd basis(int q) const;
  Eigen::MatrixXcd matrix(std::span<const double> z) const;

 private:
  Eigen::Index dim_;
  std::vector<CouplingEntry> entries_;
  Eigen::MatrixXcd fixed_;
  int unknowns_ = 0;
};

/// Polynomial optimization problem: minimize objective subject to g_j >= 0.
struct PopProblem {
  Variables variables;
  RealPolynomial objective;
  std::vector<RealPolynomial> constraints;
  /// Half-width of the sampling box for multistart.
  double box_radius = 2.0;

  double objective_at(std::span<const double> x) const { return objective.evaluate(x); }
  /// Smallest constraint value (+inf when unconstrained).
  double min_constraint(std::span<const double> x) const;
  int max_degree() const;
};

struct Truncation {
  int magnus_order = 3;
  int chebyshev_order = kDefaultChebyshevOrder;
};

/// exp_p(+Omega/2) and exp_p(-Omega/2) for a fixed Magnus polynomial.
struct SurrogateExpansions {
  ComplexMatrixPolynomial plus;
  ComplexMatrixPolynomial minus;
};

SurrogateExpansions surrogate_expansions(const ComplexMatrixPolynomial& omega, int chebyshev_order);

/// ||exp_p(Omega/2) - exp_p(-Omega/2) U*||_F^2
RealPolynomial gate_residual(const SurrogateExpansions& e, const Eigen::MatrixXcd& target);
/// ||exp_p(Omega/2) psi0 - exp_p(-Omega/2) psi*||^2
RealPolynomial state_residual(const SurrogateExpansions& e, const Eigen::VectorXcd& initial,
                              const Eigen::VectorXcd& target);

PopProblem gate_objective(const QuantumSystem& sys, const ControlAnsatz& ansatz,
                          const GateTarget& target, const Truncation& trunc = {});
PopProblem state_objective(const QuantumSystem& sys, const ControlAnsatz& ansatz,
                           const StatePair& pair, const Truncation& trunc = {});

struct TimeOptimalOptions {
  double eps = 0.1;
  /// Adds R^2 - sum x_k^2 >= 0 and T_max - T >= 0 so the feasible set is compact.
  bool box_constraints = true;
  double radius = 2.0;
  double horizon_guess = 0.5;
  double horizon_factor = 4.0;  ///< T_max = horizon_factor * horizon_guess
};

/// min T s.t. T >= 0 and eps^2 - residual(x, T) >= 0, over variables (x1..xm, T).
PopProblem min_time_gate(const QuantumSystem& sys, int controls, const GateTarget& target,
                         const Truncation& trunc = {}, const TimeOptimalOptions& opts = {});
PopProblem min_time_state(const QuantumSystem& sys, int controls, const StatePair& pair,
                          const Truncation& trunc = {}, const TimeOptimalOptions& opts = {});

/// A(t; z) = -i (H0 + E(t) V(z)) over (t, z1..zq) for a known control x.
ComplexMatrixPolynomial identification_generator(const Eigen::MatrixXcd& drift,
                                                 const CouplingPattern& pattern,
                                                 std::span<const double> known_x,
                                                 const ControlAnsatz& ansatz);

/// Gate residual as a polynomial in the unknown couplings z.
PopProblem identification_objective(const Eigen::MatrixXcd& drift, const CouplingPattern& pattern,
                                    std::span<const double> known_x, const ControlAnsatz& ansatz,
                                    const GateTarget& target, const Truncation& trunc = {});

/// Partial derivatives of the objective, one per variable.
std::vector<RealPolynomial> gradient(const PopProblem& problem);

}  // namespace qpoc
