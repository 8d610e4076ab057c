#include "qpoc/local.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace qpoc {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kFeasibilityTolerance = 1e-6;

class Merit {
 public:
  explicit Merit(const PopProblem& p) : problem_(p), grad_f_(gradient(p)) {
    for (const auto& g : p.constraints) {
      std::vector<RealPolynomial> dg;
      for (std::size_t v = 0; v < p.variables.size(); ++v) dg.push_back(differentiate(g, v));
      grad_g_.push_back(std::move(dg));
    }
  }

  std::size_t dim() const { return problem_.variables.size(); }

  double value(const Eigen::VectorXd& x, double rho) const {
    const std::span<const double> pt(x.data(), static_cast<std::size_t>(x.size()));
    double v = problem_.objective.evaluate(pt);
    for (const auto& g : problem_.constraints) {
      const double gv = std::min(0.0, g.evaluate(pt));
      v += rho * gv * gv;
    }
    return v;
  }

  Eigen::VectorXd grad(const Eigen::VectorXd& x, double rho) const {
    const std::span<const double> pt(x.data(), static_cast<std::size_t>(x.size()));
    Eigen::VectorXd out(x.size());
    for (std::size_t v = 0; v < dim(); ++v) out(static_cast<Eigen::Index>(v)) = grad_f_[v].evaluate(pt);
    for (std::size_t j = 0; j < problem_.constraints.size(); ++j) {
      const double gv = problem_.constraints[j].evaluate(pt);
      if (gv >= 0.0) continue;
      for (std::size_t v = 0; v < dim(); ++v) {
        out(static_cast<Eigen::Index>(v)) += 2.0 * rho * gv * grad_g_[j][v].evaluate(pt);
      }
    }
    return out;
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& x, double rho) const {
    const auto n = x.size();
    Eigen::MatrixXd h(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double step = 1e-5 * std::max(1.0, std::abs(x(j)));
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += step;
      xm(j) -= step;
      h.col(j) = (grad(xp, rho) - grad(xm, rho)) / (2.0 * step);
    }
    return 0.5 * (h + h.transpose());
  }

 private:
  const PopProblem& problem_;
  std::vector<RealPolynomial> grad_f_;
  std::vector<std::vector<RealPolynomial>> grad_g_;
};

struct InnerResult {
  int iterations = 0;
  double gradient_norm = 0.0;
};

void check_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw std::runtime_error(std::string("local_refine: non-finite ") + what);
}

InnerResult minimize(const Merit& merit, Eigen::VectorXd& x, double rho, const LocalOptions& opt) {
  InnerResult r;
  for (; r.iterations < opt.max_iterations; ++r.iterations) {
    const Eigen::VectorXd g = merit.grad(x, rho);
    check_finite(g, "gradient");
    r.gradient_norm = g.cwiseAbs().maxCoeff();
    const Eigen::MatrixXd h = merit.hessian(x, rho);
    check_finite(h.reshaped(), "Hessian");
    // Stationary points count only when they are not saddles.
    if (r.gradient_norm < opt.gradient_tolerance &&
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues()(0) >= -1e-8) {
      return r;
    }
    Eigen::VectorXd d;
    bool newton = false;
    bool curvature = false;
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() == Eigen::Success) {
      d = -llt.solve(g);
      newton = d.allFinite() && g.dot(d) < 0.0;
    }
    if (!newton) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      const double lmin = es.eigenvalues()(0);
      const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
      if (r.gradient_norm < 1e-8 && lmin < -1e-8) {
        // Saddle or maximum: move along the most negative curvature direction.
        d = es.eigenvectors().col(0);
        if (g.dot(d) > 0.0) d = -d;
        d *= std::max(1e-3, std::sqrt(-lmin) / std::max(1.0, lmax));
        curvature = true;
      } else {
        d = -g / std::max(1.0, lmax);
      }
    }

    const double dmax = d.cwiseAbs().maxCoeff();
    if (dmax > opt.max_step) {
      d *= opt.max_step / dmax;
      newton = false;
    }

    const double f0 = merit.value(x, rho);
    const double slope = g.dot(d);
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    for (int k = 0; k < kMaxBacktracks; ++k, alpha *= 0.5) {
      trial = x + alpha * d;
      const double ft = merit.value(trial, rho);
      if (!std::isfinite(ft)) continue;
      const bool decrease = curvature ? ft < f0 : ft <= f0 + kArmijo * alpha * slope;
      if (decrease) {
        accepted = true;
        break;
      }
    }
    if (!accepted && newton) {
      // Near a minimizer objective values are dominated by rounding; accept the
      // full Newton step when it reduces the gradient instead.
      trial = x + d;
      if (merit.grad(trial, rho).cwiseAbs().maxCoeff() < r.gradient_norm &&
          merit.value(trial, rho) <= f0 + 1e-12 * std::max(1.0, std::abs(f0))) {
        accepted = true;
      }
    }
    if (!accepted) return r;
    x = trial;
  }
  const Eigen::VectorXd g = merit.grad(x, rho);
  r.gradient_norm = g.cwiseAbs().maxCoeff();
  return r;
}

}  // namespace

bool better_solution(const LocalResult& a, const LocalResult& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible) return a.min_constraint > b.min_constraint;
  return a.value < b.value;
}

LocalResult local_refine(const PopProblem& problem, std::span<const double> x0,
                         const LocalOptions& options) {
  if (x0.size() != problem.variables.size()) {
    throw std::invalid_argument("local_refine: start point length mismatch");
  }
  Eigen::VectorXd x(static_cast<Eigen::Index>(x0.size()));
  for (std::size_t i = 0; i < x0.size(); ++i) x(static_cast<Eigen::Index>(i)) = x0[i];
  check_finite(x, "start point");

  const Merit merit(problem);
  LocalResult out;
  InnerResult inner;
  if (problem.constraints.empty()) {
    inner = minimize(merit, x, 0.0, options);
    out.iterations = inner.iterations;
  } else {
    for (double rho : options.penalties) {
      inner = minimize(merit, x, rho, options);
      out.iterations += inner.iterations;
    }
  }
  const std::span<const double> pt(x.data(), static_cast<std::size_t>(x.size()));
  out.point.assign(pt.begin(), pt.end());
  out.value = problem.objective.evaluate(pt);
  if (!std::isfinite(out.value)) throw std::runtime_error("local_refine: non-finite objective");
  out.gradient_norm = inner.gradient_norm;
  out.converged = inner.gradient_norm < options.gradient_tolerance;
  out.min_constraint = problem.min_constraint(pt);
  out.feasible = out.min_constraint >= -kFeasibilityTolerance;
  return out;
}

MultistartResult multistart_runs(const PopProblem& problem, int starts, std::uint64_t seed,
                                 const LocalOptions& options) {
  if (starts < 1) throw std::invalid_argument("multistart needs at least one start");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-problem.box_radius, problem.box_radius);
  const std::size_t n = problem.variables.size();
  std::vector<std::vector<double>> points(static_cast<std::size_t>(starts), std::vector<double>(n));
  for (auto& p : points) {
    for (auto& v : p) v = dist(rng);
  }
  MultistartResult res;
  for (const auto& p : points) {
    res.runs.push_back(local_refine(problem, p, options));
    if (res.runs.size() == 1 || better_solution(res.runs.back(), res.best)) res.best = res.runs.back();
  }
  return res;
}

}  // namespace qpoc
