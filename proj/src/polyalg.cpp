#include "qpoc/polyalg.hpp"

#include <numeric>
#include <set>

namespace qpoc {

Variables::Variables(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() > kMaxVariables) {
    throw std::invalid_argument("at most " + std::to_string(kMaxVariables) +
                                " polynomial variables are supported");
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw std::invalid_argument("empty variable name");
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate variable name '" + n + "'");
  }
}

Variables Variables::numbered(std::string_view prefix, std::size_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return Variables(std::move(names));
}

std::optional<std::size_t> Variables::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Variables::require(std::string_view name) const {
  auto i = index_of(name);
  if (!i) throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
  return *i;
}

Variables Variables::with_appended(std::string name) const {
  auto names = names_;
  names.push_back(std::move(name));
  return Variables(std::move(names));
}

Variables Variables::without(std::size_t index) const {
  auto names = names_;
  names.erase(names.begin() + static_cast<std::ptrdiff_t>(index));
  return Variables(std::move(names));
}

Monomial Monomial::from_exponents(std::span<const int> exponents) {
  if (exponents.size() > kMaxVariables) throw std::invalid_argument("too many exponents");
  Monomial m;
  for (std::size_t v = 0; v < exponents.size(); ++v) {
    const int e = exponents[v];
    if (e < 0 || e > kMaxExponent) throw std::invalid_argument("exponent out of range");
    m.bits_ |= static_cast<std::uint64_t>(e) << shift(v);
    m.degree_ += e;
  }
  return m;
}

Monomial Monomial::unit(std::size_t var, int power) {
  if (var >= kMaxVariables) throw std::invalid_argument("variable index out of range");
  return Monomial{}.with_exponent(var, power);
}

std::vector<int> Monomial::exponents(std::size_t count) const {
  std::vector<int> e(count);
  for (std::size_t v = 0; v < count; ++v) e[v] = exponent(v);
  return e;
}

Monomial Monomial::operator*(Monomial other) const {
  Monomial r;
  for (std::size_t v = 0; v < kMaxVariables; ++v) {
    const int e = exponent(v) + other.exponent(v);
    if (e > kMaxExponent) throw std::overflow_error("monomial exponent overflow");
    r.bits_ |= static_cast<std::uint64_t>(e) << shift(v);
  }
  r.degree_ = degree_ + other.degree_;
  return r;
}

Monomial Monomial::with_exponent(std::size_t var, int power) const {
  if (power < 0 || power > kMaxExponent) throw std::invalid_argument("exponent out of range");
  Monomial r = *this;
  r.degree_ += power - exponent(var);
  r.bits_ &= ~(std::uint64_t{0xff} << shift(var));
  r.bits_ |= static_cast<std::uint64_t>(power) << shift(var);
  return r;
}

Monomial Monomial::without(std::size_t var) const {
  std::array<int, kMaxVariables> e{};
  std::size_t k = 0;
  for (std::size_t v = 0; v < kMaxVariables; ++v) {
    if (v != var) e[k++] = exponent(v);
  }
  return from_exponents(std::span<const int>(e.data(), kMaxVariables));
}

Monomial Monomial::inserted(std::size_t var, int power) const {
  if (exponent(kMaxVariables - 1) != 0) throw std::overflow_error("no free variable slot");
  std::array<int, kMaxVariables> e{};
  std::size_t k = 0;
  for (std::size_t v = 0; v < kMaxVariables; ++v) {
    if (v == var) e[v] = power;
    else e[v] = exponent(k++);
  }
  return from_exponents(std::span<const int>(e.data(), kMaxVariables));
}

std::vector<Monomial> monomials_up_to(std::size_t nvars, int max_degree) {
  std::vector<Monomial> out;
  std::vector<int> e(nvars, 0);
  // Enumerate exponent vectors of each total degree in descending lex order,
  // then sort to graded lex.
  auto recurse = [&](auto&& self, std::size_t v, int remaining) -> void {
    if (v + 1 == nvars) {
      e[v] = remaining;
      out.push_back(Monomial::from_exponents(e));
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[v] = k;
      self(self, v + 1, remaining - k);
    }
    e[v] = 0;
  };
  if (nvars == 0) {
    out.push_back(Monomial{});
    return out;
  }
  for (int deg = 0; deg <= max_degree; ++deg) recurse(recurse, 0, deg);
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

std::vector<std::vector<double>> power_table(std::span<const double> point,
                                             std::span<const int> max_exponents) {
  std::vector<std::vector<double>> table(point.size());
  for (std::size_t v = 0; v < point.size(); ++v) {
    auto& row = table[v];
    row.resize(static_cast<std::size_t>(max_exponents[v]) + 1);
    row[0] = 1.0;
    for (std::size_t k = 1; k < row.size(); ++k) row[k] = row[k - 1] * point[v];
  }
  return table;
}

}  // namespace detail

RealPolynomial variable(const Variables& vars, std::size_t var) {
  if (var >= vars.size()) throw std::invalid_argument("variable index out of range");
  return RealPolynomial::term(vars, Monomial::unit(var), 1.0);
}

RealPolynomial real_constant(const Variables& vars, double value) {
  return RealPolynomial::constant(vars, value);
}

ComplexMatrixPolynomial matrix_term(const Variables& vars, Monomial m, const Eigen::MatrixXcd& c) {
  return ComplexMatrixPolynomial::term(vars, m, c);
}

ComplexMatrixPolynomial conj_transpose(const ComplexMatrixPolynomial& p) {
  return p.map_coefficients([](const Eigen::MatrixXcd& c) { return Eigen::MatrixXcd(c.adjoint()); });
}

ComplexMatrixPolynomial commutator(const ComplexMatrixPolynomial& p,
                                   const ComplexMatrixPolynomial& q) {
  return p * q - q * p;
}

ComplexMatrixPolynomial left_multiply(const Eigen::MatrixXcd& m, const ComplexMatrixPolynomial& p) {
  if (m.rows() != p.dim() || m.cols() != p.dim()) {
    throw std::invalid_argument("left_multiply: dimension mismatch");
  }
  return p.map_coefficients([&](const Eigen::MatrixXcd& c) { return Eigen::MatrixXcd(m * c); });
}

ComplexMatrixPolynomial right_multiply(const ComplexMatrixPolynomial& p, const Eigen::MatrixXcd& m) {
  if (m.rows() != p.dim() || m.cols() != p.dim()) {
    throw std::invalid_argument("right_multiply: dimension mismatch");
  }
  return p.map_coefficients([&](const Eigen::MatrixXcd& c) { return Eigen::MatrixXcd(c * m); });
}

RealPolynomial frobenius_square(const ComplexMatrixPolynomial& p) {
  const auto& terms = p.terms();
  const Eigen::Index n2 = p.dim() * p.dim();
  std::vector<const std::complex<double>*> data(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) data[i] = terms[i].second.data();

  struct Acc {
    std::complex<double> value;
    double scale = 0.0;
  };
  std::unordered_map<Monomial, Acc, MonomialHash> acc;
  acc.reserve(terms.size() * terms.size() / 2 + 1);
  for (std::size_t a = 0; a < terms.size(); ++a) {
    for (std::size_t b = 0; b < terms.size(); ++b) {
      std::complex<double> s{0.0, 0.0};
      const auto* pa = data[a];
      const auto* pb = data[b];
      for (Eigen::Index k = 0; k < n2; ++k) s += std::conj(pa[k]) * pb[k];
      auto& slot = acc[terms[a].first * terms[b].first];
      slot.value += s;
      slot.scale += std::abs(s);
    }
  }
  std::vector<RealPolynomial::Term> out;
  out.reserve(acc.size());
  for (const auto& [m, a] : acc) {
    if (std::abs(a.value.imag()) > 1e-10 * std::max(1.0, a.scale)) {
      throw std::runtime_error("frobenius_square: imaginary residue " +
                               std::to_string(a.value.imag()));
    }
    out.emplace_back(m, a.value.real());
  }
  return RealPolynomial::from_terms(p.variables(), 0, std::move(out));
}

RealPolynomial differentiate(const RealPolynomial& p, std::size_t var) {
  if (var >= p.variables().size()) throw std::invalid_argument("differentiate: unknown variable");
  std::vector<RealPolynomial::Term> out;
  for (const auto& [m, c] : p.terms()) {
    const int e = m.exponent(var);
    if (e == 0) continue;
    out.emplace_back(m.with_exponent(var, e - 1), c * e);
  }
  return RealPolynomial::from_terms(p.variables(), 0, std::move(out));
}

RealPolynomial differentiate(const RealPolynomial& p, std::string_view var) {
  return differentiate(p, p.variables().require(var));
}

ComplexMatrixPolynomial times_matrix(const RealPolynomial& p, const Eigen::MatrixXcd& m) {
  std::vector<ComplexMatrixPolynomial::Term> out;
  out.reserve(p.size());
  for (const auto& [mono, c] : p.terms()) out.emplace_back(mono, Eigen::MatrixXcd(c * m));
  return ComplexMatrixPolynomial::from_terms(p.variables(), m.rows(), std::move(out));
}

}  // namespace qpoc
