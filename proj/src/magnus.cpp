#include "qpoc/magnus.hpp"

#include "qpoc/linalg.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qpoc {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr int kQuadraturePanels = 32;

}  // namespace

QuantumSystem::QuantumSystem(Eigen::MatrixXcd drift, Eigen::MatrixXcd control)
    : drift_(std::move(drift)), control_(std::move(control)) {
  if (drift_.rows() == 0 || drift_.rows() != drift_.cols()) {
    throw std::invalid_argument("drift Hamiltonian must be a nonempty square matrix");
  }
  if (control_.rows() != drift_.rows() || control_.cols() != drift_.cols()) {
    throw std::invalid_argument("control Hamiltonian dimension differs from drift");
  }
  if (hermiticity_defect(drift_) >= kHermitianTolerance) {
    throw std::invalid_argument("drift Hamiltonian is not Hermitian");
  }
  if (hermiticity_defect(control_) >= kHermitianTolerance) {
    throw std::invalid_argument("control Hamiltonian is not Hermitian");
  }
}

ControlAnsatz::ControlAnsatz(int controls, std::optional<double> horizon)
    : controls_(controls), horizon_(horizon) {
  if (controls_ < 1) throw std::invalid_argument("control ansatz needs at least one coefficient");
  if (horizon_ && !(*horizon_ > 0.0 && std::isfinite(*horizon_))) {
    throw std::invalid_argument("control horizon T must be positive");
  }
}

ControlAnsatz ControlAnsatz::fixed(int controls, double horizon) {
  return ControlAnsatz(controls, horizon);
}

ControlAnsatz ControlAnsatz::symbolic(int controls) { return ControlAnsatz(controls, std::nullopt); }

double ControlAnsatz::horizon() const {
  if (!horizon_) throw std::logic_error("control horizon is symbolic");
  return *horizon_;
}

Variables ControlAnsatz::variables() const {
  auto vars = Variables::numbered("x", static_cast<std::size_t>(controls_));
  return horizon_ ? vars : vars.with_appended(kHorizonVariable);
}

double ControlAnsatz::field(std::span<const double> x, double t) const {
  if (x.size() < static_cast<std::size_t>(controls_)) {
    throw std::invalid_argument("too few control coefficients");
  }
  double e = 0.0;
  double tp = 1.0;
  for (int k = 0; k < controls_; ++k) {
    e += x[static_cast<std::size_t>(k)] * tp;
    tp *= t;
  }
  return e;
}

ComplexMatrixPolynomial generator_poly(const QuantumSystem& sys, const ControlAnsatz& ansatz) {
  const Variables problem = ansatz.variables();
  std::vector<std::string> names{kTimeVariable};
  names.insert(names.end(), problem.names().begin(), problem.names().end());
  const Variables vars(std::move(names));

  std::vector<ComplexMatrixPolynomial::Term> terms;
  terms.emplace_back(Monomial{}, Eigen::MatrixXcd(-kI * sys.drift()));
  const Eigen::MatrixXcd coupling = -kI * sys.control();
  for (int k = 1; k <= ansatz.controls(); ++k) {
    // x_k t^(k-1)
    const Monomial m = Monomial::unit(0, k - 1) * Monomial::unit(static_cast<std::size_t>(k));
    terms.emplace_back(m, coupling);
  }
  return ComplexMatrixPolynomial::from_terms(vars, sys.dim(), std::move(terms));
}

double SimplexIntegral::at(double horizon) const {
  return coefficient * std::pow(horizon, horizon_power);
}

SimplexIntegral simplex_monomial_integral(std::span<const int> exponents) {
  if (exponents.empty() || exponents.size() > 3) {
    throw std::invalid_argument("simplex integrals are defined for 1 to 3 nested variables");
  }
  for (int a : exponents) {
    if (a < 0) throw std::invalid_argument("negative exponent in simplex integral");
  }
  // Integrate innermost-out: each step turns t^s into t^(s+1)/(s+1) and
  // multiplies by the next outer variable's power.
  double denominator = 1.0;
  int power = 0;
  for (auto it = exponents.rbegin(); it != exponents.rend(); ++it) {
    power += *it + 1;
    denominator *= power;
  }
  return {1.0 / denominator, power};
}

double simplex_monomial_integral(std::span<const int> exponents, double horizon) {
  return simplex_monomial_integral(exponents).at(horizon);
}

namespace {

// Coefficients of t^a in the generator, each a polynomial over the remaining variables.
std::vector<ComplexMatrixPolynomial> split_time_powers(const ComplexMatrixPolynomial& generator) {
  const Variables rest = generator.variables().without(0);
  const int max_power = std::max(0, generator.degree_in(std::size_t{0}));
  std::vector<std::vector<ComplexMatrixPolynomial::Term>> buckets(
      static_cast<std::size_t>(max_power) + 1);
  for (const auto& [m, c] : generator.terms()) {
    buckets[static_cast<std::size_t>(m.exponent(0))].emplace_back(m.without(0), c);
  }
  std::vector<ComplexMatrixPolynomial> parts;
  parts.reserve(buckets.size());
  for (auto& b : buckets) {
    parts.push_back(ComplexMatrixPolynomial::from_terms(rest, generator.dim(), std::move(b)));
  }
  return parts;
}

class Integrator {
 public:
  Integrator(const Variables& vars, const HorizonSpec& horizon) {
    if (const auto* value = std::get_if<double>(&horizon)) {
      if (!(*value > 0.0)) throw std::invalid_argument("Magnus horizon must be positive");
      value_ = *value;
    } else {
      horizon_var_ = vars.require(std::get<std::string>(horizon));
    }
  }

  ComplexMatrixPolynomial apply(std::span<const int> exps, const ComplexMatrixPolynomial& p,
                                double weight) const {
    const SimplexIntegral s = simplex_monomial_integral(exps);
    if (value_) return p.scaled(weight * s.at(*value_));
    return p.scaled(weight * s.coefficient).shifted(Monomial::unit(horizon_var_, s.horizon_power));
  }

 private:
  std::optional<double> value_;
  std::size_t horizon_var_ = 0;
};

}  // namespace

MagnusResult magnus_omega(const ComplexMatrixPolynomial& generator, const HorizonSpec& horizon,
                          int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("Magnus order must be 1, 2 or 3");
  if (generator.variables().size() == 0 || generator.variables()[0] != kTimeVariable) {
    throw std::invalid_argument("generator variable 0 must be the time t");
  }
  const auto parts = split_time_powers(generator);
  const Variables vars = generator.variables().without(0);
  const Integrator integrate(vars, horizon);
  const std::size_t k = parts.size();

  ComplexMatrixPolynomial omega(vars, generator.dim());
  for (std::size_t a = 0; a < k; ++a) {
    const int e[] = {static_cast<int>(a)};
    omega = omega + integrate.apply(e, parts[a], 1.0);
  }
  if (order >= 2) {
    std::vector<ComplexMatrixPolynomial> pair(k * k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) pair[a * k + b] = commutator(parts[a], parts[b]);
    }
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        const int e[] = {static_cast<int>(a), static_cast<int>(b)};
        omega = omega + integrate.apply(e, pair[a * k + b], 0.5);
      }
    }
    if (order >= 3) {
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          for (std::size_t c = 0; c < k; ++c) {
            const auto nested =
                commutator(parts[a], pair[b * k + c]) + commutator(pair[a * k + b], parts[c]);
            const int e[] = {static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)};
            omega = omega + integrate.apply(e, nested, 1.0 / 6.0);
          }
        }
      }
    }
  }
  return {std::move(omega), order};
}

MagnusResult magnus_omega(const QuantumSystem& sys, const ControlAnsatz& ansatz, int order) {
  const auto generator = generator_poly(sys, ansatz);
  if (ansatz.symbolic_horizon()) {
    return magnus_omega(generator, HorizonSpec{std::string(kHorizonVariable)}, order);
  }
  return magnus_omega(generator, HorizonSpec{ansatz.horizon()}, order);
}

double convergence_functional(const QuantumSystem& sys, const ControlAnsatz& ansatz,
                              std::span<const double> x) {
  const double horizon = ansatz.horizon();
  auto norm_at = [&](double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sys.hamiltonian(ansatz.field(x, t)),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  };
  const double h = horizon / kQuadraturePanels;
  double total = 0.0;
  for (int j = 0; j < kQuadraturePanels; ++j) {
    total += boost::math::quadrature::gauss<double, 16>::integrate(norm_at, j * h, (j + 1) * h);
  }
  return total;
}

}  // namespace qpoc
