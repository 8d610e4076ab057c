#include "qpoc/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

namespace qpoc {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::degraded: return "degraded";
    case SdpStatus::max_iterations: return "max_iterations";
    case SdpStatus::numerical_failure: return "numerical_failure";
    case SdpStatus::dual_unbounded: return "dual_unbounded";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  if (c.size() != block_sizes.size()) throw std::invalid_argument("SDP: C block count mismatch");
  for (std::size_t k = 0; k < block_sizes.size(); ++k) {
    if (block_sizes[k] < 1) throw std::invalid_argument("SDP: empty block");
    if (c[k].rows() != block_sizes[k] || c[k].cols() != block_sizes[k]) {
      throw std::invalid_argument("SDP: C block has wrong size");
    }
  }
  if (b.size() != static_cast<Eigen::Index>(a.size())) {
    throw std::invalid_argument("SDP: b length differs from constraint count");
  }
  for (const auto& ai : a) {
    for (const auto& e : ai) {
      if (e.block < 0 || e.block >= static_cast<int>(block_sizes.size())) {
        throw std::invalid_argument("SDP: entry block out of range");
      }
      const int n = block_sizes[static_cast<std::size_t>(e.block)];
      if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n || e.row > e.col) {
        throw std::invalid_argument("SDP: entry index out of range or below diagonal");
      }
    }
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LocalEntry {
  int row;
  int col;
  int local_row;  // position of row in Part::columns
  int local_col;
  double value;
};

struct Part {
  int block;
  std::vector<LocalEntry> entries;
  std::vector<int> columns;
};

struct Structure {
  std::vector<std::vector<Part>> parts;
  // per block: (constraint index, part index within parts[constraint])
  std::vector<std::vector<std::pair<int, int>>> by_block;
  std::vector<double> norms;  // ||A_i||_F
};

Structure analyze(const SdpProblem& p) {
  Structure s;
  s.parts.resize(p.a.size());
  s.by_block.resize(p.block_sizes.size());
  s.norms.assign(p.a.size(), 0.0);
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    std::map<int, std::vector<SdpEntry>> grouped;
    for (const auto& e : p.a[i]) grouped[e.block].push_back(e);
    double norm2 = 0.0;
    for (auto& [block, entries] : grouped) {
      Part part;
      part.block = block;
      std::vector<int> cols;
      for (const auto& e : entries) {
        cols.push_back(e.row);
        cols.push_back(e.col);
        norm2 += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
      }
      std::sort(cols.begin(), cols.end());
      cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
      auto local = [&](int c) {
        return static_cast<int>(std::lower_bound(cols.begin(), cols.end(), c) - cols.begin());
      };
      for (const auto& e : entries) {
        part.entries.push_back({e.row, e.col, local(e.row), local(e.col), e.value});
      }
      part.columns = std::move(cols);
      s.by_block[static_cast<std::size_t>(block)].emplace_back(static_cast<int>(i),
                                                              static_cast<int>(s.parts[i].size()));
      s.parts[i].push_back(std::move(part));
    }
    s.norms[i] = std::sqrt(norm2);
  }
  return s;
}

double sym_dot(const Part& part, const Eigen::MatrixXd& m) {
  double s = 0.0;
  for (const auto& e : part.entries) {
    s += e.value * (e.row == e.col ? m(e.row, e.col) : m(e.row, e.col) + m(e.col, e.row));
  }
  return s;
}

double inner(const BlockMatrix& a, const BlockMatrix& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double frobenius(const BlockMatrix& a) { return std::sqrt(inner(a, a)); }

BlockMatrix zeros_like(const std::vector<int>& sizes) {
  BlockMatrix out;
  out.reserve(sizes.size());
  for (int n : sizes) out.push_back(Eigen::MatrixXd::Zero(n, n));
  return out;
}

Eigen::VectorXd apply_a(const Structure& s, const BlockMatrix& x) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(s.parts.size()));
  for (std::size_t i = 0; i < s.parts.size(); ++i) {
    double v = 0.0;
    for (const auto& part : s.parts[i]) v += sym_dot(part, x[static_cast<std::size_t>(part.block)]);
    out(static_cast<Eigen::Index>(i)) = v;
  }
  return out;
}

BlockMatrix apply_at(const Structure& s, const std::vector<int>& sizes, const Eigen::VectorXd& y) {
  BlockMatrix out = zeros_like(sizes);
  for (std::size_t i = 0; i < s.parts.size(); ++i) {
    const double yi = y(static_cast<Eigen::Index>(i));
    if (yi == 0.0) continue;
    for (const auto& part : s.parts[i]) {
      auto& m = out[static_cast<std::size_t>(part.block)];
      for (const auto& e : part.entries) {
        m(e.row, e.col) += yi * e.value;
        if (e.row != e.col) m(e.col, e.row) += yi * e.value;
      }
    }
  }
  return out;
}

void symmetrize(BlockMatrix& m) {
  for (auto& b : m) b = 0.5 * (b + b.transpose()).eval();
}

struct Scaling {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  Eigen::MatrixXd w;
  Eigen::VectorXd lambda;
};

// Nesterov-Todd scaling point: G^T Z G = G^{-1} X G^{-T} = diag(lambda), W = G G^T.
std::optional<std::vector<Scaling>> nt_scaling(const BlockMatrix& x, const BlockMatrix& z) {
  std::vector<Scaling> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<Eigen::MatrixXd> cx(x[k]);
    Eigen::LLT<Eigen::MatrixXd> cz(z[k]);
    if (cx.info() != Eigen::Success || cz.info() != Eigen::Success) return std::nullopt;
    const Eigen::MatrixXd lx = cx.matrixL();
    const Eigen::MatrixXd lz = cz.matrixL();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lz.transpose() * lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd d = svd.singularValues();
    if (d.minCoeff() <= 0.0 || !d.allFinite()) return std::nullopt;
    const Eigen::VectorXd d_isqrt = d.cwiseSqrt().cwiseInverse();
    auto& sc = out[k];
    sc.lambda = d;
    sc.g = lx * svd.matrixV() * d_isqrt.asDiagonal();
    // G^{-1} = D^{1/2} V^T Lx^{-1}
    const Eigen::MatrixXd lx_inv =
        lx.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(lx.rows(), lx.cols()));
    sc.g_inv = d.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * lx_inv;
    sc.w = sc.g * sc.g.transpose();
  }
  return out;
}

Eigen::MatrixXd schur_complement(const Structure& s, const std::vector<Scaling>& sc, int m) {
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (const auto& part : s.parts[static_cast<std::size_t>(i)]) {
      const auto& w = sc[static_cast<std::size_t>(part.block)].w;
      const auto ncols = static_cast<Eigen::Index>(part.columns.size());
      // W S restricted to the touched columns, then (W S) W.
      Eigen::MatrixXd ws = Eigen::MatrixXd::Zero(w.rows(), ncols);
      for (const auto& e : part.entries) {
        ws.col(e.local_col) += e.value * w.col(e.row);
        if (e.row != e.col) ws.col(e.local_row) += e.value * w.col(e.col);
      }
      Eigen::MatrixXd wsub(ncols, w.cols());
      for (Eigen::Index c = 0; c < ncols; ++c) wsub.row(c) = w.row(part.columns[static_cast<std::size_t>(c)]);
      const Eigen::MatrixXd g = ws * wsub;
      for (const auto& [j, pj] : s.by_block[static_cast<std::size_t>(part.block)]) {
        if (j < i) continue;
        mat(i, j) += sym_dot(s.parts[static_cast<std::size_t>(j)][static_cast<std::size_t>(pj)], g);
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) mat(j, i) = mat(i, j);
  }
  return mat;
}

// Largest alpha with X + alpha dX >= 0 (inf if unbounded); negative when X is not PD.
double max_step(const BlockMatrix& x, const BlockMatrix& dx) {
  double alpha = kInf;
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<Eigen::MatrixXd> llt(x[k]);
    if (llt.info() != Eigen::Success) return -1.0;
    const Eigen::MatrixXd l = llt.matrixL();
    const auto tri = l.triangularView<Eigen::Lower>();
    Eigen::MatrixXd t = tri.solve(dx[k]);
    t = tri.solve(t.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

class SchurSolver {
 public:
  explicit SchurSolver(const Eigen::MatrixXd& m) {
    // Diagonal equilibration; fall back to LDLT, then to a tiny Tikhonov shift.
    scale_ = m.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    scaled_ = scale_.asDiagonal() * m * scale_.asDiagonal();
    llt_.compute(scaled_);
    if (llt_.info() == Eigen::Success) {
      use_llt_ = true;
      return;
    }
    ldlt_.compute(scaled_);
    if (ldlt_.info() != Eigen::Success || !ldlt_.isPositive()) {
      const double shift = 1e-12 * std::max(1.0, scaled_.diagonal().maxCoeff());
      scaled_.diagonal().array() += shift;
      ldlt_.compute(scaled_);
    }
    ok_ = ldlt_.info() == Eigen::Success;
  }
  bool ok() const { return ok_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    const Eigen::VectorXd r = scale_.asDiagonal() * rhs;
    Eigen::VectorXd u = use_llt_ ? Eigen::VectorXd(llt_.solve(r)) : Eigen::VectorXd(ldlt_.solve(r));
    return scale_.asDiagonal() * u;
  }

 private:
  Eigen::VectorXd scale_;
  Eigen::MatrixXd scaled_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  bool use_llt_ = false;
  bool ok_ = true;
};

struct Iterate {
  BlockMatrix x;
  BlockMatrix z;
  Eigen::VectorXd y;
};

struct Measures {
  double pobj = 0.0;
  double dobj = 0.0;
  double relgap = kInf;
  double pinf = kInf;
  double dinf = kInf;
  double mu = 0.0;
  double merit() const { return std::max({relgap, pinf, dinf}); }
};

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  const Structure s = analyze(problem);
  const int m = problem.constraints();
  const auto& sizes = problem.block_sizes;
  int total_n = 0;
  for (int n : sizes) total_n += n;

  const double b_norm = problem.b.norm();
  const double c_norm = frobenius(problem.c);

  // Starting point in the style of SDPT3.
  Iterate it;
  it.y = Eigen::VectorXd::Zero(m);
  double max_ratio = 0.0;
  double max_a = 0.0;
  for (int i = 0; i < m; ++i) {
    max_ratio = std::max(max_ratio, (1.0 + std::abs(problem.b(i))) / (1.0 + s.norms[static_cast<std::size_t>(i)]));
    max_a = std::max(max_a, s.norms[static_cast<std::size_t>(i)]);
  }
  for (int n : sizes) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double xi = std::max({10.0, rn, n * max_ratio});
    const double eta = std::max({10.0, rn, max_a, c_norm});
    it.x.push_back(xi * Eigen::MatrixXd::Identity(n, n));
    it.z.push_back(eta * Eigen::MatrixXd::Identity(n, n));
  }

  auto measure = [&](const Iterate& p, Eigen::VectorXd& rp, BlockMatrix& rd) {
    Measures ms;
    rp = problem.b - apply_a(s, p.x);
    rd = apply_at(s, sizes, p.y);
    for (std::size_t k = 0; k < sizes.size(); ++k) rd[k] = problem.c[k] - p.z[k] - rd[k];
    ms.pobj = inner(problem.c, p.x);
    ms.dobj = problem.b.dot(p.y);
    ms.relgap = std::abs(ms.pobj - ms.dobj) / (1.0 + std::abs(ms.pobj) + std::abs(ms.dobj));
    ms.pinf = rp.norm() / (1.0 + b_norm);
    ms.dinf = frobenius(rd) / (1.0 + c_norm);
    ms.mu = inner(p.x, p.z) / total_n;
    return ms;
  };

  SdpSolution sol;
  Iterate best = it;
  Measures best_ms;
  double alpha_p_prev = 1.0;
  double alpha_d_prev = 1.0;
  int stall = 0;
  int no_progress = 0;
  double progress_mark = kInf;
  bool failed = false;
  bool unbounded = false;
  int iter = 0;

  for (;; ++iter) {
    Eigen::VectorXd rp;
    BlockMatrix rd;
    const Measures ms = measure(it, rp, rd);
    if (ms.merit() < best_ms.merit()) {
      best = it;
      best_ms = ms;
    }
    if (ms.merit() < 0.5 * progress_mark) {
      progress_mark = ms.merit();
      no_progress = 0;
    } else if (++no_progress >= 25) {
      break;  // stalled well away from the tolerances
    }
    if (ms.relgap < options.gap_tolerance && ms.pinf < options.feasibility_tolerance &&
        ms.dinf < options.feasibility_tolerance) {
      break;
    }
    if (ms.dinf < 1e-6 && ms.dobj > 1e10 * (1.0 + std::abs(ms.pobj) + c_norm)) {
      unbounded = true;
      break;
    }
    if (iter >= options.max_iterations) break;

    const auto scaling = nt_scaling(it.x, it.z);
    if (!scaling) {
      failed = true;
      break;
    }
    const SchurSolver schur(schur_complement(s, *scaling, m));
    if (!schur.ok()) {
      failed = true;
      break;
    }

    BlockMatrix w_rd_w(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      w_rd_w[k] = (*scaling)[k].w * rd[k] * (*scaling)[k].w;
    }
    const Eigen::VectorXd a_w_rd_w = apply_a(s, w_rd_w);

    auto direction = [&](const BlockMatrix& rc, BlockMatrix& dx, BlockMatrix& dz, Eigen::VectorXd& dy) {
      const Eigen::VectorXd rhs = rp - apply_a(s, rc) + a_w_rd_w;
      dy = schur.solve(rhs);
      dz = apply_at(s, sizes, dy);
      dx.resize(sizes.size());
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        dz[k] = rd[k] - dz[k];
        const auto& w = (*scaling)[k].w;
        dx[k] = rc[k] - w * dz[k] * w;
      }
      symmetrize(dx);
      symmetrize(dz);
    };

    auto step_lengths = [&](const BlockMatrix& dx, const BlockMatrix& dz, double gamma) {
      const double ap = max_step(it.x, dx);
      const double ad = max_step(it.z, dz);
      return std::pair{std::min(1.0, gamma * ap), std::min(1.0, gamma * ad)};
    };

    // Predictor (sigma = 0): R_c = -X.
    BlockMatrix rc(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) rc[k] = -it.x[k];
    BlockMatrix dx_p, dz_p;
    Eigen::VectorXd dy_p;
    direction(rc, dx_p, dz_p, dy_p);
    const double gamma = 0.9 + 0.09 * std::min(alpha_p_prev, alpha_d_prev);
    auto [ap_aff, ad_aff] = step_lengths(dx_p, dz_p, 1.0);
    if (ap_aff < 0.0 || ad_aff < 0.0) {
      failed = true;
      break;
    }
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      mu_aff += ((it.x[k] + ap_aff * dx_p[k]).cwiseProduct(it.z[k] + ad_aff * dz_p[k])).sum();
    }
    mu_aff /= total_n;
    const double expo = std::max(1.0, 3.0 * std::pow(std::min(ap_aff, ad_aff), 2));
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / ms.mu, expo), 0.0, 1.0);

    // Corrector in the scaled space: L_lambda^{-1}(sigma mu I - Lambda^2 - sym(dX~ dZ~)).
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const auto& sc = (*scaling)[k];
      const Eigen::MatrixXd dxs = sc.g_inv * dx_p[k] * sc.g_inv.transpose();
      const Eigen::MatrixXd dzs = sc.g.transpose() * dz_p[k] * sc.g;
      Eigen::MatrixXd r = -0.5 * (dxs * dzs + dzs * dxs);
      const auto n = r.rows();
      for (Eigen::Index i = 0; i < n; ++i) r(i, i) += sigma * ms.mu - sc.lambda(i) * sc.lambda(i);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) r(i, j) *= 2.0 / (sc.lambda(i) + sc.lambda(j));
      }
      rc[k] = sc.g * r * sc.g.transpose();
    }
    BlockMatrix dx, dz;
    Eigen::VectorXd dy;
    direction(rc, dx, dz, dy);
    if (!dy.allFinite()) {
      failed = true;
      break;
    }
    auto [ap, ad] = step_lengths(dx, dz, gamma);
    if (ap < 0.0 || ad < 0.0) {
      failed = true;
      break;
    }
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      it.x[k] += ap * dx[k];
      it.z[k] += ad * dz[k];
    }
    it.y += ad * dy;
    alpha_p_prev = ap;
    alpha_d_prev = ad;
    stall = (std::max(ap, ad) < 1e-8) ? stall + 1 : 0;
    if (stall >= 3) break;
  }

  Eigen::VectorXd rp;
  BlockMatrix rd;
  Measures final_ms = measure(it, rp, rd);
  if (best_ms.merit() < final_ms.merit()) {
    it = best;
    final_ms = measure(it, rp, rd);
  }
  sol.x = std::move(it.x);
  sol.z = std::move(it.z);
  sol.y = std::move(it.y);
  sol.primal_objective = final_ms.pobj;
  sol.dual_objective = final_ms.dobj;
  sol.relative_gap = final_ms.relgap;
  sol.primal_infeasibility = final_ms.pinf;
  sol.dual_infeasibility = final_ms.dinf;
  sol.iterations = iter;
  if (unbounded) {
    sol.status = SdpStatus::dual_unbounded;
  } else if (final_ms.relgap < 1e-7 && final_ms.pinf < 1e-8 && final_ms.dinf < 1e-8) {
    sol.status = SdpStatus::optimal;
  } else if (failed && final_ms.merit() > 1e-4) {
    sol.status = SdpStatus::numerical_failure;
  } else if (iter >= options.max_iterations) {
    sol.status = SdpStatus::max_iterations;
  } else {
    sol.status = SdpStatus::degraded;
  }
  return sol;
}

}  // namespace qpoc
