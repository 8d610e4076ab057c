#include "qpoc/objective.hpp"

#include "qpoc/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qpoc {

namespace {

constexpr double kUnitTolerance = 1e-10;

Eigen::MatrixXcd first_column_embedding(const Eigen::VectorXcd& v) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(v.size(), v.size());
  m.col(0) = v;
  return m;
}

void check_truncation(const Truncation& t) {
  if (t.magnus_order < 1 || t.magnus_order > 3) throw std::invalid_argument("Magnus order must be 1..3");
  if (t.chebyshev_order < 0) throw std::invalid_argument("Chebyshev order must be >= 0");
}

}  // namespace

GateTarget::GateTarget(Eigen::MatrixXcd unitary) : unitary_(std::move(unitary)) {
  if (unitary_.rows() == 0 || unitary_.rows() != unitary_.cols()) {
    throw std::invalid_argument("target must be a nonempty square matrix");
  }
  if (unitarity_defect(unitary_) >= kUnitTolerance) {
    throw std::invalid_argument("target matrix is not unitary");
  }
}

StatePair::StatePair(Eigen::VectorXcd initial, Eigen::VectorXcd target)
    : initial_(std::move(initial)), target_(std::move(target)) {
  if (initial_.size() == 0 || initial_.size() != target_.size()) {
    throw std::invalid_argument("state pair dimensions differ");
  }
  if (std::abs(initial_.norm() - 1.0) >= kUnitTolerance ||
      std::abs(target_.norm() - 1.0) >= kUnitTolerance) {
    throw std::invalid_argument("states must have unit norm");
  }
}

CouplingPattern::CouplingPattern(Eigen::Index dim, std::vector<CouplingEntry> entries,
                                 Eigen::MatrixXcd fixed)
    : dim_(dim), entries_(std::move(entries)), fixed_(std::move(fixed)) {
  if (dim_ < 1) throw std::invalid_argument("coupling pattern dimension must be positive");
  if (fixed_.size() == 0) fixed_ = Eigen::MatrixXcd::Zero(dim_, dim_);
  if (fixed_.rows() != dim_ || fixed_.cols() != dim_) {
    throw std::invalid_argument("fixed coupling matrix dimension mismatch");
  }
  if (hermiticity_defect(fixed_) >= 1e-12) {
    throw std::invalid_argument("coupling pattern breaks Hermiticity: fixed part is not Hermitian");
  }
  for (const auto& e : entries_) {
    if (e.row < 0 || e.col < 0 || e.row >= dim_ || e.col >= dim_ || e.index < 0) {
      throw std::invalid_argument("coupling entry out of range");
    }
    if (fixed_(e.row, e.col) != Complex{0.0, 0.0}) {
      throw std::invalid_argument("coupling entry overlaps a fixed nonzero entry");
    }
    unknowns_ = std::max(unknowns_, e.index + 1);
  }
  for (std::size_t a = 0; a < entries_.size(); ++a) {
    for (std::size_t b = a + 1; b < entries_.size(); ++b) {
      const auto& p = entries_[a];
      const auto& q = entries_[b];
      const bool same = (p.row == q.row && p.col == q.col) || (p.row == q.col && p.col == q.row);
      if (same && p.index != q.index) {
        throw std::invalid_argument("coupling pattern breaks Hermiticity: conflicting unknowns");
      }
    }
  }
}

Eigen::MatrixXcd CouplingPattern::basis(int q) const {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (const auto& e : entries_) {
    if (e.index != q) continue;
    p(e.row, e.col) = 1.0;
    p(e.col, e.row) = 1.0;
  }
  return p;
}

Eigen::MatrixXcd CouplingPattern::matrix(std::span<const double> z) const {
  if (z.size() != static_cast<std::size_t>(unknowns_)) {
    throw std::invalid_argument("coupling vector length mismatch");
  }
  Eigen::MatrixXcd v = fixed_;
  for (int q = 0; q < unknowns_; ++q) v += z[static_cast<std::size_t>(q)] * basis(q);
  return v;
}

double PopProblem::min_constraint(std::span<const double> x) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& g : constraints) m = std::min(m, g.evaluate(x));
  return m;
}

int PopProblem::max_degree() const {
  int d = objective.degree();
  for (const auto& g : constraints) d = std::max(d, g.degree());
  return d;
}

SurrogateExpansions surrogate_expansions(const ComplexMatrixPolynomial& omega, int chebyshev_order) {
  return {cheb_exp(omega, chebyshev_order, 1).result, cheb_exp(omega, chebyshev_order, -1).result};
}

RealPolynomial gate_residual(const SurrogateExpansions& e, const Eigen::MatrixXcd& target) {
  return frobenius_square(e.plus - right_multiply(e.minus, target));
}

RealPolynomial state_residual(const SurrogateExpansions& e, const Eigen::VectorXcd& initial,
                              const Eigen::VectorXcd& target) {
  return frobenius_square(right_multiply(e.plus, first_column_embedding(initial)) -
                          right_multiply(e.minus, first_column_embedding(target)));
}

PopProblem gate_objective(const QuantumSystem& sys, const ControlAnsatz& ansatz,
                          const GateTarget& target, const Truncation& trunc) {
  check_truncation(trunc);
  if (ansatz.symbolic_horizon()) throw std::invalid_argument("gate_objective needs a fixed horizon");
  if (target.unitary().rows() != sys.dim()) throw std::invalid_argument("target dimension mismatch");
  const auto omega = magnus_omega(sys, ansatz, trunc.magnus_order).omega;
  const auto e = surrogate_expansions(omega, trunc.chebyshev_order);
  return {omega.variables(), gate_residual(e, target.unitary()), {}};
}

PopProblem state_objective(const QuantumSystem& sys, const ControlAnsatz& ansatz,
                           const StatePair& pair, const Truncation& trunc) {
  check_truncation(trunc);
  if (ansatz.symbolic_horizon()) throw std::invalid_argument("state_objective needs a fixed horizon");
  if (pair.initial().size() != sys.dim()) throw std::invalid_argument("state dimension mismatch");
  const auto omega = magnus_omega(sys, ansatz, trunc.magnus_order).omega;
  const auto e = surrogate_expansions(omega, trunc.chebyshev_order);
  return {omega.variables(), state_residual(e, pair.initial(), pair.target()), {}};
}

namespace {

PopProblem time_optimal(const Variables& vars, const RealPolynomial& residual,
                        const TimeOptimalOptions& opts, int controls) {
  if (!(opts.eps > 0.0)) throw std::invalid_argument("time-optimal accuracy eps must be positive");
  const std::size_t t_index = vars.require(kHorizonVariable);
  const RealPolynomial horizon = variable(vars, t_index);
  PopProblem prob;
  prob.variables = vars;
  prob.objective = horizon;
  prob.constraints.push_back(horizon);
  prob.constraints.push_back(real_constant(vars, opts.eps * opts.eps) - residual);
  prob.box_radius = opts.radius;
  if (opts.box_constraints) {
    RealPolynomial ball = real_constant(vars, opts.radius * opts.radius);
    for (int k = 0; k < controls; ++k) {
      const auto xk = variable(vars, static_cast<std::size_t>(k));
      ball = ball - xk * xk;
    }
    prob.constraints.push_back(ball);
    prob.constraints.push_back(real_constant(vars, opts.horizon_factor * opts.horizon_guess) -
                               horizon);
    prob.box_radius = std::max(opts.radius, opts.horizon_factor * opts.horizon_guess);
  }
  return prob;
}

}  // namespace

PopProblem min_time_gate(const QuantumSystem& sys, int controls, const GateTarget& target,
                         const Truncation& trunc, const TimeOptimalOptions& opts) {
  check_truncation(trunc);
  const auto ansatz = ControlAnsatz::symbolic(controls);
  const auto omega = magnus_omega(sys, ansatz, trunc.magnus_order).omega;
  const auto e = surrogate_expansions(omega, trunc.chebyshev_order);
  return time_optimal(omega.variables(), gate_residual(e, target.unitary()), opts, controls);
}

PopProblem min_time_state(const QuantumSystem& sys, int controls, const StatePair& pair,
                          const Truncation& trunc, const TimeOptimalOptions& opts) {
  check_truncation(trunc);
  const auto ansatz = ControlAnsatz::symbolic(controls);
  const auto omega = magnus_omega(sys, ansatz, trunc.magnus_order).omega;
  const auto e = surrogate_expansions(omega, trunc.chebyshev_order);
  return time_optimal(omega.variables(), state_residual(e, pair.initial(), pair.target()), opts,
                      controls);
}

ComplexMatrixPolynomial identification_generator(const Eigen::MatrixXcd& drift,
                                                 const CouplingPattern& pattern,
                                                 std::span<const double> known_x,
                                                 const ControlAnsatz& ansatz) {
  if (hermiticity_defect(drift) >= 1e-12) throw std::invalid_argument("drift is not Hermitian");
  if (drift.rows() != pattern.dim()) throw std::invalid_argument("pattern dimension mismatch");
  if (known_x.size() != static_cast<std::size_t>(ansatz.controls())) {
    throw std::invalid_argument("known control length mismatch");
  }
  const auto zvars = Variables::numbered("z", static_cast<std::size_t>(pattern.unknowns()));
  std::vector<std::string> names{kTimeVariable};
  names.insert(names.end(), zvars.names().begin(), zvars.names().end());
  const Variables vars(std::move(names));

  std::vector<ComplexMatrixPolynomial::Term> terms;
  terms.emplace_back(Monomial{}, Eigen::MatrixXcd(-kI * drift));
  for (int k = 1; k <= ansatz.controls(); ++k) {
    const double xk = known_x[static_cast<std::size_t>(k - 1)];
    const Monomial tk = Monomial::unit(0, k - 1);
    terms.emplace_back(tk, Eigen::MatrixXcd(-kI * xk * pattern.fixed()));
    for (int q = 0; q < pattern.unknowns(); ++q) {
      terms.emplace_back(tk * Monomial::unit(static_cast<std::size_t>(q) + 1),
                         Eigen::MatrixXcd(-kI * xk * pattern.basis(q)));
    }
  }
  return ComplexMatrixPolynomial::from_terms(vars, drift.rows(), std::move(terms));
}

PopProblem identification_objective(const Eigen::MatrixXcd& drift, const CouplingPattern& pattern,
                                    std::span<const double> known_x, const ControlAnsatz& ansatz,
                                    const GateTarget& target, const Truncation& trunc) {
  check_truncation(trunc);
  const auto generator = identification_generator(drift, pattern, known_x, ansatz);
  const auto omega = magnus_omega(generator, HorizonSpec{ansatz.horizon()}, trunc.magnus_order).omega;
  const auto e = surrogate_expansions(omega, trunc.chebyshev_order);
  return {omega.variables(), gate_residual(e, target.unitary()), {}};
}

std::vector<RealPolynomial> gradient(const PopProblem& problem) {
  std::vector<RealPolynomial> g;
  g.reserve(problem.variables.size());
  for (std::size_t v = 0; v < problem.variables.size(); ++v) {
    g.push_back(differentiate(problem.objective, v));
  }
  return g;
}

}  // namespace qpoc
