#include "qpoc/relaxation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace qpoc {

namespace {

double max_abs_coefficient(const RealPolynomial& p) {
  double m = 0.0;
  for (const auto& [mono, c] : p.terms()) m = std::max(m, std::abs(c));
  return m;
}

int half_ceil(int degree) { return degree <= 0 ? 0 : (degree + 1) / 2; }

}  // namespace

int minimal_relaxation_order(const PopProblem& problem) {
  int d = std::max(1, half_ceil(problem.objective.degree()));
  for (const auto& g : problem.constraints) d = std::max(d, half_ceil(g.degree()));
  return d;
}

MomentRelaxation build_relaxation(const PopProblem& problem, int order) {
  if (order < 1) throw std::invalid_argument("relaxation order must be >= 1");
  if (problem.objective.degree() > 2 * order) {
    throw std::invalid_argument("relaxation order " + std::to_string(order) +
                                " is too small for objective degree " +
                                std::to_string(problem.objective.degree()));
  }
  for (const auto& g : problem.constraints) {
    if (!(g.variables() == problem.variables)) throw std::invalid_argument("constraint variable set differs");
    if (half_ceil(g.degree()) > order) {
      throw std::invalid_argument("relaxation order too small for a constraint of degree " +
                                  std::to_string(g.degree()));
    }
  }
  if (!(problem.objective.variables() == problem.variables)) {
    throw std::invalid_argument("objective variable set differs");
  }

  MomentRelaxation rel;
  rel.order = order;
  rel.variables = problem.variables;
  const std::size_t n = problem.variables.size();
  rel.basis = monomials_up_to(n, order);
  rel.moments = monomials_up_to(n, 2 * order);
  for (std::size_t i = 0; i < rel.moments.size(); ++i) {
    rel.moment_index.emplace(rel.moments[i], static_cast<int>(i));
  }

  auto& sdp = rel.sdp;
  const std::size_t m = rel.moments.size() - 1;
  sdp.a.assign(m, {});
  sdp.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));

  // Appends sum_gamma w_gamma y_{beta_i + beta_j + gamma} for i <= j in block k.
  auto add_block = [&](int constraint, int basis_degree, const RealPolynomial* weight) {
    std::size_t size = 0;
    while (size < rel.basis.size() && rel.basis[size].degree() <= basis_degree) ++size;
    const int k = static_cast<int>(sdp.block_sizes.size());
    sdp.block_sizes.push_back(static_cast<int>(size));
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
    const double wscale = weight ? max_abs_coefficient(*weight) : 1.0;
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = i; j < size; ++j) {
        const Monomial base = rel.basis[i] * rel.basis[j];
        auto put = [&](Monomial mono, double v) {
          const int idx = rel.moment_index.at(mono);
          if (idx == 0) {
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += v;
            if (i != j) c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) += v;
          } else {
            // A_alpha = -B_alpha so that Z = C - sum y A = M(y).
            sdp.a[static_cast<std::size_t>(idx - 1)].push_back(
                {k, static_cast<int>(i), static_cast<int>(j), -v});
          }
        };
        if (!weight) {
          put(base, 1.0);
        } else {
          for (const auto& [gm, gc] : weight->terms()) put(base * gm, gc / wscale);
        }
      }
    }
    sdp.c.push_back(std::move(c));
    rel.blocks.push_back({constraint, basis_degree, static_cast<int>(size)});
  };

  add_block(-1, order, nullptr);
  for (std::size_t j = 0; j < problem.constraints.size(); ++j) {
    const auto& g = problem.constraints[j];
    if (g.empty()) continue;  // 0 >= 0 holds everywhere
    add_block(static_cast<int>(j), order - half_ceil(g.degree()), &g);
  }

  const double fscale = max_abs_coefficient(problem.objective);
  rel.objective_scale = fscale > 0.0 ? fscale : 1.0;
  for (const auto& [mono, c] : problem.objective.terms()) {
    const int idx = rel.moment_index.at(mono);
    if (idx == 0) {
      rel.objective_constant = c;
    } else {
      sdp.b(idx - 1) = -c / rel.objective_scale;
    }
  }
  return rel;
}

Eigen::VectorXd MomentRelaxation::pseudo_moments(const SdpSolution& sol) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(moments.size()));
  y(0) = 1.0;
  y.tail(y.size() - 1) = sol.y;
  return y;
}

Eigen::MatrixXd MomentRelaxation::moment_matrix(const Eigen::VectorXd& y) const {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      m(i, j) = m(j, i) = y(moment_index.at(basis[static_cast<std::size_t>(i)] *
                                            basis[static_cast<std::size_t>(j)]));
    }
  }
  return m;
}

double MomentRelaxation::lower_bound(const SdpSolution& sol) const {
  // L_y(f) = f_0 + sum_{alpha != 0} f_alpha y_alpha = f_0 - scale * b^T y
  return objective_constant - objective_scale * sdp.b.dot(sol.y);
}

Extraction extract_minimizer(const MomentRelaxation& rel, const SdpSolution& sol) {
  Extraction ex;
  const Eigen::VectorXd y = rel.pseudo_moments(sol);
  const Eigen::MatrixXd m = rel.moment_matrix(y);
  const std::size_t n = rel.variables.size();
  ex.point.resize(n);
  for (std::size_t v = 0; v < n; ++v) ex.point[v] = y(rel.moment_index.at(Monomial::unit(v)));

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd s = svd.singularValues();
  const double s1 = s(0);
  ex.singular_ratio = s.size() > 1 && s1 > 0.0 ? s(1) / s1 : 0.0;
  ex.rank_one = ex.singular_ratio < 1e-6;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-6 * s1) ++ex.numerical_rank;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  ex.min_eigenvalue = es.eigenvalues()(0);
  return ex;
}

}  // namespace qpoc
