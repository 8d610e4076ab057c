#pragma once

#include "qpoc/polyalg.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <variant>

namespace qpoc {

/// Drift H0 and control coupling V (hbar = 1). Both must be Hermitian.
class QuantumSystem {
 public:
  QuantumSystem(Eigen::MatrixXcd drift, Eigen::MatrixXcd control);

  const Eigen::MatrixXcd& drift() const { return drift_; }
  const Eigen::MatrixXcd& control() const { return control_; }
  Eigen::Index dim() const { return drift_.rows(); }

  /// H0 + field * V
  Eigen::MatrixXcd hamiltonian(double field) const { return drift_ + field * control_; }

 private:
  Eigen::MatrixXcd drift_;
  Eigen::MatrixXcd control_;
};

/// E(t) = sum_k x_k t^(k-1) over a horizon that is either a fixed T > 0 or an
/// extra polynomial variable named "T".
class ControlAnsatz {
 public:
  static ControlAnsatz fixed(int controls, double horizon);
  static ControlAnsatz symbolic(int controls);

  int controls() const { return controls_; }
  bool symbolic_horizon() const { return !horizon_.has_value(); }
  double horizon() const;

  /// x1..xm, plus T when the horizon is symbolic.
  Variables variables() const;

  /// E(t) at the given control coefficients (first `controls()` entries of x).
  double field(std::span<const double> x, double t) const;

 private:
  ControlAnsatz(int controls, std::optional<double> horizon);
  int controls_;
  std::optional<double> horizon_;
};

inline constexpr const char* kTimeVariable = "t";
inline constexpr const char* kHorizonVariable = "T";

/// A(t; x) = -i (H0 + E(t) V) over the variables (t, x1..xm[, T]).
ComplexMatrixPolynomial generator_poly(const QuantumSystem& sys, const ControlAnsatz& ansatz);

/// Value of the nested simplex integral
///   int_0^T dt1 t1^a1 int_0^t1 dt2 t2^a2 int_0^t2 dt3 t3^a3
/// as coefficient * T^horizon_power.
struct SimplexIntegral {
  double coefficient = 0.0;
  int horizon_power = 0;
  double at(double horizon) const;
};

SimplexIntegral simplex_monomial_integral(std::span<const int> exponents);
double simplex_monomial_integral(std::span<const int> exponents, double horizon);

/// Fixed horizon value, or the name of the polynomial variable carrying it.
using HorizonSpec = std::variant<double, std::string>;

struct MagnusResult {
  ComplexMatrixPolynomial omega;
  int order = 0;
};

/// Truncated Magnus exponent Omega^(n), n in {1, 2, 3}, for a generator
/// polynomial whose variable 0 is the time t. The result is over the
/// remaining variables.
MagnusResult magnus_omega(const ComplexMatrixPolynomial& generator, const HorizonSpec& horizon,
                          int order);

MagnusResult magnus_omega(const QuantumSystem& sys, const ControlAnsatz& ansatz, int order);

/// int_0^T ||A(t)||_2 dt for fixed T (composite 16-point Gauss-Legendre, 32 panels).
/// The Magnus series is guaranteed to converge when this is below pi.
double convergence_functional(const QuantumSystem& sys, const ControlAnsatz& ansatz,
                              std::span<const double> x);

}  // namespace qpoc
