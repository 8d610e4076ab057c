#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qpoc {

inline constexpr std::size_t kMaxVariables = 8;
inline constexpr int kMaxExponent = 255;

/// Absolute magnitude below which coefficients are dropped after every
/// arithmetic operation. For matrix coefficients the entrywise max-abs is used.
inline constexpr double kPruneThreshold = 1e-14;

/// Ordered list of named real variables.
class Variables {
 public:
  Variables() = default;
  explicit Variables(std::vector<std::string> names);

  /// prefix1, prefix2, ..., prefix<count>
  static Variables numbered(std::string_view prefix, std::size_t count);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& operator[](std::size_t i) const { return names_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t require(std::string_view name) const;

  Variables with_appended(std::string name) const;
  Variables without(std::size_t index) const;

  bool operator==(const Variables&) const = default;

 private:
  std::vector<std::string> names_;
};

/// Exponent tuple packed one byte per variable; variable 0 occupies the most
/// significant byte so that integer order on the packed word is lexicographic.
class Monomial {
 public:
  Monomial() = default;
  static Monomial from_exponents(std::span<const int> exponents);
  static Monomial unit(std::size_t var, int power = 1);

  int exponent(std::size_t var) const {
    return static_cast<int>((bits_ >> shift(var)) & 0xffu);
  }
  int degree() const { return degree_; }
  bool is_constant() const { return degree_ == 0; }
  std::uint64_t packed() const { return bits_; }
  std::vector<int> exponents(std::size_t count) const;

  Monomial operator*(Monomial other) const;
  /// Copy with the exponent of `var` replaced.
  Monomial with_exponent(std::size_t var, int power) const;
  /// Drops variable `var`, shifting later variables down by one slot.
  Monomial without(std::size_t var) const;
  /// Inserts a new variable slot at `var` carrying `power`.
  Monomial inserted(std::size_t var, int power) const;

  friend bool operator==(Monomial a, Monomial b) { return a.bits_ == b.bits_; }
  /// Graded order; within a degree, lexicographically larger exponent tuples
  /// come first (1, x1, x2, x1^2, x1 x2, x2^2, ...).
  friend bool operator<(Monomial a, Monomial b) {
    return a.degree_ != b.degree_ ? a.degree_ < b.degree_ : a.bits_ > b.bits_;
  }

 private:
  static constexpr unsigned shift(std::size_t var) {
    return static_cast<unsigned>(8 * (kMaxVariables - 1 - var));
  }
  std::uint64_t bits_ = 0;
  int degree_ = 0;
};

struct MonomialHash {
  std::size_t operator()(Monomial m) const noexcept {
    std::uint64_t z = m.packed() + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

/// Graded-lex list of all monomials in `nvars` variables of total degree <= max_degree.
std::vector<Monomial> monomials_up_to(std::size_t nvars, int max_degree);

template <class C>
struct CoefficientTraits;

template <>
struct CoefficientTraits<double> {
  static double zero(Eigen::Index) { return 0.0; }
  static double magnitude(double c) { return std::abs(c); }
  static Eigen::Index dim(double) { return 0; }
};

template <>
struct CoefficientTraits<Eigen::MatrixXcd> {
  static Eigen::MatrixXcd zero(Eigen::Index n) { return Eigen::MatrixXcd::Zero(n, n); }
  static double magnitude(const Eigen::MatrixXcd& c) {
    return c.size() == 0 ? 0.0 : c.cwiseAbs().maxCoeff();
  }
  static Eigen::Index dim(const Eigen::MatrixXcd& c) { return c.rows(); }
};

namespace detail {

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

// powers[v][e] = point[v]^e
std::vector<std::vector<double>> power_table(std::span<const double> point,
                                             std::span<const int> max_exponents);

}  // namespace detail

/// Multivariate polynomial with commuting real variables and coefficients in C
/// (real scalars or dense square complex matrices). Terms are kept in graded-lex
/// order with pruned coefficients; values are immutable after construction.
template <class C>
class Polynomial {
 public:
  using Coefficient = C;
  using Term = std::pair<Monomial, C>;
  using Traits = CoefficientTraits<C>;

  Polynomial() = default;
  explicit Polynomial(Variables vars, Eigen::Index dim = 0) : vars_(std::move(vars)), dim_(dim) {}

  static Polynomial from_terms(Variables vars, Eigen::Index dim, std::vector<Term> terms) {
    Polynomial p(std::move(vars), dim);
    std::unordered_map<Monomial, C, MonomialHash> acc;
    acc.reserve(terms.size());
    for (auto& [m, c] : terms) {
      p.check_monomial(m);
      p.check_coefficient(c);
      auto it = acc.find(m);
      if (it == acc.end()) {
        acc.emplace(m, std::move(c));
      } else {
        it->second += c;
      }
    }
    p.assign(std::move(acc));
    return p;
  }

  static Polynomial constant(Variables vars, C value) {
    const Eigen::Index d = Traits::dim(value);
    return from_terms(std::move(vars), d, {{Monomial{}, std::move(value)}});
  }

  static Polynomial term(Variables vars, Monomial m, C value) {
    const Eigen::Index d = Traits::dim(value);
    return from_terms(std::move(vars), d, {{m, std::move(value)}});
  }

  const Variables& variables() const { return vars_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.back().first.degree(); }

  /// Maximum exponent of one variable; -1 for the zero polynomial.
  int degree_in(std::size_t var) const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(var));
    return d;
  }

  /// Maximum total degree restricted to a subset of variables.
  int degree_in(std::span<const std::size_t> vars) const {
    int d = -1;
    for (const auto& [m, c] : terms_) {
      int s = 0;
      for (auto v : vars) s += m.exponent(v);
      d = std::max(d, s);
    }
    return d;
  }

  const C* find(Monomial m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, Monomial key) { return t.first < key; });
    if (it != terms_.end() && it->first == m) return &it->second;
    return nullptr;
  }

  C coefficient(Monomial m) const {
    const C* c = find(m);
    return c ? *c : Traits::zero(dim_);
  }

  Polynomial operator+(const Polynomial& q) const { return combine(q, 1.0); }
  Polynomial operator-(const Polynomial& q) const { return combine(q, -1.0); }
  Polynomial operator-() const { return scaled(-1.0); }

  Polynomial operator*(const Polynomial& q) const {
    check_compatible(q);
    std::unordered_map<Monomial, C, MonomialHash> acc;
    acc.reserve(terms_.size() * q.terms_.size());
    for (const auto& [ma, ca] : terms_) {
      for (const auto& [mb, cb] : q.terms_) {
        const Monomial m = ma * mb;
        auto it = acc.find(m);
        if (it == acc.end()) {
          acc.emplace(m, C(ca * cb));
        } else {
          it->second += ca * cb;
        }
      }
    }
    Polynomial r(vars_, dim_);
    r.assign(std::move(acc));
    return r;
  }

  template <class S>
  Polynomial scaled(const S& s) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [m, c] : terms_) out.emplace_back(m, C(c * s));
    return from_sorted(std::move(out));
  }

  /// Multiplies every term by a monomial (no cancellation possible).
  Polynomial shifted(Monomial by) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [m, c] : terms_) out.emplace_back(m * by, c);
    return from_sorted(std::move(out));
  }

  /// Applies `fn` to every coefficient; result must keep the same dimension.
  template <class Fn>
  Polynomial map_coefficients(Fn&& fn) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [m, c] : terms_) out.emplace_back(m, C(fn(c)));
    return from_sorted(std::move(out));
  }

  /// Same terms expressed over `target`, which must contain every variable
  /// that appears with a nonzero exponent.
  Polynomial reindexed(const Variables& target) const {
    std::vector<std::size_t> where(vars_.size());
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      auto idx = target.index_of(vars_[v]);
      where[v] = idx ? *idx : kMaxVariables;
    }
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [m, c] : terms_) {
      std::vector<int> e(target.size(), 0);
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        const int k = m.exponent(v);
        if (k == 0) continue;
        if (where[v] == kMaxVariables) {
          throw std::invalid_argument("reindex: variable '" + vars_[v] + "' missing from target");
        }
        e[where[v]] = k;
      }
      out.emplace_back(Monomial::from_exponents(e), c);
    }
    return from_terms(target, dim_, std::move(out));
  }

  C evaluate(std::span<const double> point) const {
    if (point.size() != vars_.size()) {
      throw std::invalid_argument("evaluate: point has " + std::to_string(point.size()) +
                                  " entries, expected " + std::to_string(vars_.size()));
    }
    std::vector<int> maxe(vars_.size(), 0);
    for (const auto& [m, c] : terms_) {
      for (std::size_t v = 0; v < vars_.size(); ++v) maxe[v] = std::max(maxe[v], m.exponent(v));
    }
    const auto powers = detail::power_table(point, maxe);
    auto monomial_value = [&](Monomial m) {
      double r = 1.0;
      for (std::size_t v = 0; v < vars_.size(); ++v) r *= powers[v][m.exponent(v)];
      return r;
    };
    if constexpr (std::is_same_v<C, double>) {
      detail::CompensatedSum s;
      for (const auto& [m, c] : terms_) s.add(c * monomial_value(m));
      return s.value();
    } else {
      const Eigen::Index n = dim_;
      std::vector<detail::CompensatedSum> re(n * n), im(n * n);
      for (const auto& [m, c] : terms_) {
        const double w = monomial_value(m);
        for (Eigen::Index j = 0; j < n; ++j) {
          for (Eigen::Index i = 0; i < n; ++i) {
            re[j * n + i].add(w * c(i, j).real());
            im[j * n + i].add(w * c(i, j).imag());
          }
        }
      }
      C out(n, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
          out(i, j) = {re[j * n + i].value(), im[j * n + i].value()};
        }
      }
      return out;
    }
  }

  /// Identical variable sets, dimensions and term lists (exact coefficient equality).
  bool identical(const Polynomial& q) const {
    if (!(vars_ == q.vars_) || dim_ != q.dim_ || terms_.size() != q.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (!(terms_[i].first == q.terms_[i].first)) return false;
      if (terms_[i].second != q.terms_[i].second) return false;
    }
    return true;
  }

 private:
  void check_compatible(const Polynomial& q) const {
    if (!(vars_ == q.vars_)) throw std::invalid_argument("polynomial variable sets differ");
    if (dim_ != q.dim_) throw std::invalid_argument("polynomial coefficient dimensions differ");
  }

  void check_monomial(Monomial m) const {
    for (std::size_t v = vars_.size(); v < kMaxVariables; ++v) {
      if (m.exponent(v) != 0) throw std::invalid_argument("monomial exceeds variable count");
    }
  }

  void check_coefficient(const C& c) const {
    if constexpr (!std::is_same_v<C, double>) {
      if (c.rows() != dim_ || c.cols() != dim_) {
        throw std::invalid_argument("coefficient matrix dimension mismatch");
      }
    }
  }

  Polynomial combine(const Polynomial& q, double sign) const {
    check_compatible(q);
    std::vector<Term> out;
    out.reserve(terms_.size() + q.terms_.size());
    auto a = terms_.begin();
    auto b = q.terms_.begin();
    while (a != terms_.end() || b != q.terms_.end()) {
      if (b == q.terms_.end() || (a != terms_.end() && a->first < b->first)) {
        out.push_back(*a++);
      } else if (a == terms_.end() || b->first < a->first) {
        out.emplace_back(b->first, C(b->second * sign));
        ++b;
      } else {
        out.emplace_back(a->first, C(a->second + b->second * sign));
        ++a;
        ++b;
      }
    }
    return from_sorted(std::move(out));
  }

  Polynomial from_sorted(std::vector<Term> sorted) const {
    Polynomial r(vars_, dim_);
    sorted.erase(std::remove_if(sorted.begin(), sorted.end(),
                                [](const Term& t) {
                                  return !(Traits::magnitude(t.second) >= kPruneThreshold);
                                }),
                 sorted.end());
    r.terms_ = std::move(sorted);
    return r;
  }

  void assign(std::unordered_map<Monomial, C, MonomialHash>&& acc) {
    terms_.clear();
    terms_.reserve(acc.size());
    for (auto& [m, c] : acc) {
      if (Traits::magnitude(c) >= kPruneThreshold) terms_.emplace_back(m, std::move(c));
    }
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
  }

  Variables vars_;
  Eigen::Index dim_ = 0;
  std::vector<Term> terms_;
};

using RealPolynomial = Polynomial<double>;
using ComplexMatrixPolynomial = Polynomial<Eigen::MatrixXcd>;

/// x_var as a real polynomial.
RealPolynomial variable(const Variables& vars, std::size_t var);
RealPolynomial real_constant(const Variables& vars, double value);

/// Constant matrix coefficient times x^m.
ComplexMatrixPolynomial matrix_term(const Variables& vars, Monomial m, const Eigen::MatrixXcd& c);

/// Entrywise conjugate transpose of every coefficient.
ComplexMatrixPolynomial conj_transpose(const ComplexMatrixPolynomial& p);

/// [p, q] = pq - qp.
ComplexMatrixPolynomial commutator(const ComplexMatrixPolynomial& p,
                                   const ComplexMatrixPolynomial& q);

ComplexMatrixPolynomial left_multiply(const Eigen::MatrixXcd& m, const ComplexMatrixPolynomial& p);
ComplexMatrixPolynomial right_multiply(const ComplexMatrixPolynomial& p, const Eigen::MatrixXcd& m);

/// Tr(p(x)^dagger p(x)) as a real polynomial. Throws std::runtime_error when an
/// imaginary residue above 1e-10 survives, which indicates broken conjugation.
RealPolynomial frobenius_square(const ComplexMatrixPolynomial& p);

/// Formal partial derivative with respect to variable index `var`.
RealPolynomial differentiate(const RealPolynomial& p, std::size_t var);
RealPolynomial differentiate(const RealPolynomial& p, std::string_view var);

/// Real polynomial lifted to a matrix polynomial: p(x) * m.
ComplexMatrixPolynomial times_matrix(const RealPolynomial& p, const Eigen::MatrixXcd& m);

}  // namespace qpoc
