#include "groupsample/antialias.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>

#include "groupsample/rng.hpp"

namespace groupsample {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXcd hermitian_projector(const Eigen::MatrixXcd& b) {
  const Eigen::MatrixXcd btb = b.adjoint() * b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(btb);
  const double lmax = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() <= 1e-12 * lmax) {
    throw RankDeficientBasisError("equivariance_objective: B^T B is singular",
                                  es.eigenvectors().col(0).real());
  }
  return b * btb.ldlt().solve(b.adjoint());
}

}  // namespace

ReynoldsAverager make_reynolds(const FiniteGroup& g, const FourierBasis& basis) {
  ReynoldsAverager avg;
  avg.spectral = spectral_regular_rep(basis, g);
  avg.inverse_index.assign(g.inv.begin(), g.inv.end());
  return avg;
}

Eigen::MatrixXcd reynolds_apply(const ReynoldsAverager& avg, const Eigen::MatrixXcd& x) {
  const int n = avg.spectral.group_order;
  if (x.rows() != n || x.cols() != n) throw std::invalid_argument("reynolds_apply: matrix shape mismatch");
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (int g = 0; g < n; ++g) {
    acc += avg.spectral.matrices[g] * x * avg.spectral.matrices[avg.inverse_index[g]];
  }
  return acc / static_cast<double>(n);
}

double equivariance_objective(const Eigen::MatrixXd& m, const FourierBasis& basis, const ReynoldsAverager& avg) {
  const Eigen::MatrixXcd b = basis.inverse * m.cast<std::complex<double>>();
  const Eigen::MatrixXcd p = hermitian_projector(b);
  const Eigen::MatrixXcd p_hat = basis.forward * p * basis.inverse;
  return (p_hat - reynolds_apply(avg, p_hat)).squaredNorm();
}

Eigen::MatrixXd cayley_laplacian(const FiniteGroup& g, const GeneratorSpec& gens) {
  std::set<std::pair<Element, Element>> edges;
  for (Element a = 0; a < g.order; ++a) {
    for (Element s : gens.generators) {
      const Element b = g.mul[a][s];
      if (a != b) edges.insert(std::minmax(a, b));
    }
  }
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(g.order, g.order);
  for (const auto& [a, b] : edges) {
    lap(a, b) -= 1.0;
    lap(b, a) -= 1.0;
    lap(a, a) += 1.0;
    lap(b, b) += 1.0;
  }
  return lap;
}

SmoothnessWeights smoothness_weights(const FourierBasis& basis, const Eigen::MatrixXd& laplacian) {
  if (laplacian.rows() != basis.group_order || laplacian.cols() != basis.group_order) {
    throw std::invalid_argument("smoothness_weights: Laplacian shape mismatch");
  }
  const Eigen::MatrixXcd lc = laplacian.cast<std::complex<double>>();
  SmoothnessWeights out;
  out.w = (basis.inverse.adjoint() * lc * basis.inverse).diagonal().real();
  return out;
}

double smooth_objective(const Eigen::MatrixXd& m, const SmoothnessWeights& weights) {
  if (m.rows() != weights.w.size()) throw std::invalid_argument("smooth_objective: weight length mismatch");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) acc += weights.w[i] * std::abs(m(i, j));
  }
  return acc;
}

double projector_equivariance_error(const Eigen::MatrixXd& projector, const FiniteGroup& g) {
  const int n = g.order;
  if (projector.rows() != n || projector.cols() != n) {
    throw std::invalid_argument("projector_equivariance_error: shape mismatch");
  }
  const double pnorm = projector.norm();
  if (pnorm == 0.0) return 0.0;
  double worst = 0.0;
  for (Element a = 0; a < n; ++a) {
    double acc = 0.0;
    for (int v = 0; v < n; ++v) {
      const int gv = g.mul[a][v];
      for (int u = 0; u < n; ++u) {
        // (P rho(a))[u,v] = P[u, a*v]; (rho(a) P)[u,v] = P[a^{-1}*u, v]
        const double d = projector(u, gv) - projector(g.mul[g.inv[a]][u], v);
        acc += d * d;
      }
    }
    worst = std::max(worst, std::sqrt(acc));
  }
  return worst / pnorm;
}

// ---------------------------------------------------------------------------
// AntialiasProblem

AntialiasProblem::AntialiasProblem(const FiniteGroup& group, const FourierBasis& basis_parent,
                                   const FourierBasis& basis_sub, const SamplingMatrix& sampling,
                                   const SmoothnessWeights& weights, double lambda, double abs_smoothing)
    : n_(group.order),
      m_(sampling.rows),
      inv_(basis_parent.inverse_real()),
      sub_inv_(basis_sub.inverse_real()),
      selection_(sampling.selection),
      w_(weights.w),
      lambda_(lambda),
      eps_(abs_smoothing) {
  if (basis_parent.group_order != n_ || sampling.cols != n_) {
    throw std::invalid_argument("AntialiasProblem: parent dimensions disagree");
  }
  if (basis_sub.group_order != m_) throw std::invalid_argument("AntialiasProblem: subgroup dimensions disagree");
  if (w_.size() != n_) throw std::invalid_argument("AntialiasProblem: weight length mismatch");
  if (lambda_ < 0) throw std::invalid_argument("AntialiasProblem: lambda must be nonnegative");

  Eigen::MatrixXd a(m_, n_);
  for (int j = 0; j < m_; ++j) a.row(j) = inv_.row(selection_[j]);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV | Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  if (sv.size() < m_ || sv(m_ - 1) <= 1e-10 * std::max(1.0, sv(0))) {
    throw InfeasibleConstraintError("solve_M: rank of S F^{-1} is below |G_sub|; constraint is infeasible");
  }
  particular_ = svd.solve(sub_inv_);
  null_basis_ = svd.matrixV().rightCols(n_ - m_);

  inv_perms_.resize(n_);
  for (Element g = 0; g < n_; ++g) {
    inv_perms_[g].resize(n_);
    const Element gi = group.inv[g];
    for (int u = 0; u < n_; ++u) inv_perms_[g][u] = group.mul[gi][u];
  }
}

Eigen::MatrixXd AntialiasProblem::m_of(const Eigen::MatrixXd& coeffs) const {
  if (null_basis_.cols() == 0) return particular_;
  return particular_ + null_basis_ * coeffs;
}

Eigen::MatrixXd AntialiasProblem::coeffs_of(const Eigen::MatrixXd& m) const {
  return null_basis_.transpose() * (m - particular_);
}

Eigen::MatrixXd AntialiasProblem::spatial_reynolds(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_, n_);
  for (int g = 0; g < n_; ++g) {
    const auto& q = inv_perms_[g];
    for (int v = 0; v < n_; ++v) {
      const int qv = q[v];
      for (int u = 0; u < n_; ++u) acc(u, v) += x(q[u], qv);
    }
  }
  return acc / static_cast<double>(n_);
}

double AntialiasProblem::constraint_residual(const Eigen::MatrixXd& m) const {
  const Eigen::MatrixXd b = inv_ * m;
  Eigen::MatrixXd sb(m_, m_);
  for (int j = 0; j < m_; ++j) sb.row(j) = b.row(selection_[j]);
  return (sb - sub_inv_).norm();
}

namespace {

struct Evaluation {
  double f = kInf;
  double equivariance = 0.0;
  Eigen::MatrixXd grad;  // empty unless requested and finite
};

}  // namespace

// Shared evaluation path for objective/gradient. E(M) = ||P - R(P)||_F^2 in
// the spatial domain equals the spectral form by unitarity of the basis.
static Evaluation evaluate(const AntialiasProblem& prob, const Eigen::MatrixXd& coeffs, bool want_grad,
                           const Eigen::MatrixXd& inv, const Eigen::VectorXd& w, double lambda, double eps,
                           const Eigen::MatrixXd& null_basis) {
  Evaluation out;
  const Eigen::MatrixXd m = prob.m_of(coeffs);
  const Eigen::MatrixXd b = inv * m;
  const Eigen::MatrixXd btb = b.transpose() * b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(btb);
  const double lmax = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() <= 1e-12 * lmax) return out;  // rank-deficient step: reject with +inf

  const Eigen::MatrixXd bplus =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose() * b.transpose();
  const Eigen::MatrixXd p = b * bplus;
  const Eigen::MatrixXd r = prob.spatial_reynolds(p);

  const double equi = (p - r).squaredNorm();
  double smooth = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) smooth += w[i] * std::sqrt(m(i, j) * m(i, j) + eps * eps);
  }
  out.f = equi + lambda * smooth;
  out.equivariance = equi;

  if (want_grad) {
    // dE = -4 (I - P) R (B^+)^T through B, pulled back by M -> B = F^{-1} M.
    const Eigen::MatrixXd gb = -4.0 * (r - p * r) * bplus.transpose();
    Eigen::MatrixXd gm = inv.transpose() * gb;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        gm(i, j) += lambda * w[i] * m(i, j) / std::sqrt(m(i, j) * m(i, j) + eps * eps);
      }
    }
    out.grad = null_basis.transpose() * gm;
  }
  return out;
}

double AntialiasProblem::objective(const Eigen::MatrixXd& coeffs) const {
  return evaluate(*this, coeffs, false, inv_, w_, lambda_, eps_, null_basis_).f;
}

Eigen::MatrixXd AntialiasProblem::gradient(const Eigen::MatrixXd& coeffs) const {
  Evaluation ev = evaluate(*this, coeffs, true, inv_, w_, lambda_, eps_, null_basis_);
  if (!std::isfinite(ev.f)) throw RankDeficientBasisError("gradient: B is rank deficient", Eigen::VectorXd());
  return ev.grad;
}

double AntialiasProblem::equivariance_term(const Eigen::MatrixXd& coeffs) const {
  Evaluation ev = evaluate(*this, coeffs, false, inv_, w_, lambda_, eps_, null_basis_);
  return ev.equivariance;
}

Eigen::MatrixXd AntialiasProblem::equivariance_gradient(const Eigen::MatrixXd& coeffs) const {
  Evaluation ev = evaluate(*this, coeffs, true, inv_, w_, 0.0, eps_, null_basis_);
  if (!std::isfinite(ev.f)) throw RankDeficientBasisError("equivariance_gradient: B is rank deficient", {});
  return ev.grad;
}

double AntialiasProblem::stationarity(const Eigen::MatrixXd& coeffs) const {
  if (null_basis_.cols() == 0) return 0.0;
  const Eigen::MatrixXd m = m_of(coeffs);
  const double zero_tol = 1e-7;

  // Residual r(s) = grad E + lambda Z^T (w .* S) with the sign matrix S fixed
  // on the supported entries and s_ij in [-1, 1] free on the zeros. The
  // minimum over the box is the distance from zero to the subdifferential,
  // found by exact cyclic coordinate descent (each coordinate subproblem is a
  // clamped 1-d least squares).
  Eigen::MatrixXd ws = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  std::vector<std::pair<int, int>> zeros;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) > zero_tol) {
        ws(i, j) = w_[i] * (m(i, j) > 0 ? 1.0 : -1.0);
      } else if (w_[i] > 1e-15 && lambda_ > 0) {
        zeros.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  Eigen::MatrixXd r = equivariance_gradient(coeffs) + lambda_ * (null_basis_.transpose() * ws);
  if (zeros.empty()) return r.norm();

  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(zeros.size()));
  double prev = r.squaredNorm();
  for (int sweep = 0; sweep < 400; ++sweep) {
    for (std::size_t k = 0; k < zeros.size(); ++k) {
      const auto [i, j] = zeros[k];
      const double a = lambda_ * w_[i];
      const double ra = a * (null_basis_.row(i) * r.col(j))(0);
      const double na2 = a * a * null_basis_.row(i).squaredNorm();
      const double snew = std::clamp(s[k] - ra / na2, -1.0, 1.0);
      const double ds = snew - s[k];
      if (ds != 0.0) {
        r.col(j) += a * ds * null_basis_.row(i).transpose();
        s[k] = snew;
      }
    }
    const double cur = r.squaredNorm();
    if (prev - cur <= 1e-14 * std::max(1.0, cur)) break;
    prev = cur;
  }
  return r.norm();
}

Eigen::MatrixXd AntialiasProblem::projector(const Eigen::MatrixXd& coeffs) const {
  const Eigen::MatrixXd b = inv_ * m_of(coeffs);
  const Eigen::MatrixXd btb = b.transpose() * b;
  return b * btb.ldlt().solve(b.transpose());
}

// ---------------------------------------------------------------------------
// Solver

namespace {

struct LbfgsOutcome {
  Eigen::VectorXd x;
  double f = kInf;
  double gnorm = kInf;
  double stat = kInf;  // min-norm subgradient measure at x
  int iterations = 0;
  bool converged = false;
  double max_residual = 0.0;
  std::vector<double> history;
};

// Plain L-BFGS with Armijo backtracking over the flattened free coefficients.
LbfgsOutcome lbfgs_minimize(const AntialiasProblem& prob, const Eigen::MatrixXd& c0, int max_iter, double gtol) {
  const int rows = static_cast<int>(c0.rows());
  const int cols = static_cast<int>(c0.cols());
  const int dim = rows * cols;

  auto as_matrix = [&](const Eigen::VectorXd& v) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols).eval();
  };

  LbfgsOutcome out;
  out.x = Eigen::Map<const Eigen::VectorXd>(c0.data(), dim);

  auto eval_f = [&](const Eigen::VectorXd& v) { return prob.objective(as_matrix(v)); };
  auto eval_g = [&](const Eigen::VectorXd& v) {
    const Eigen::MatrixXd g = prob.gradient(as_matrix(v));
    return Eigen::Map<const Eigen::VectorXd>(g.data(), dim).eval();
  };

  double f = eval_f(out.x);
  if (!std::isfinite(f)) throw RankDeficientBasisError("solve_M: initial point has rank-deficient B", {});
  Eigen::VectorXd g = eval_g(out.x);
  out.history.push_back(f);
  out.max_residual = prob.constraint_residual(prob.m_of(as_matrix(out.x)));

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;  // (s, y)
  const std::size_t memory = 8;
  const double c1 = 1e-4;

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    out.gnorm = g.norm();
    if (out.gnorm <= gtol) {
      out.converged = true;
      break;
    }
    // The smoothed gradient crawls near supported l1 kinks; the subgradient
    // measure recognizes stationarity much earlier.
    if (out.gnorm <= 1e-3 && iter % 25 == 0) {
      out.stat = prob.stationarity(as_matrix(out.x));
      if (out.stat <= gtol) {
        out.converged = true;
        break;
      }
    }

    // Two-loop recursion.
    Eigen::VectorXd d = -g;
    std::vector<double> alpha(pairs.size());
    for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
      const auto& [s, y] = pairs[i];
      alpha[i] = s.dot(d) / s.dot(y);
      d -= alpha[i] * y;
    }
    if (!pairs.empty()) {
      const auto& [s, y] = pairs.back();
      d *= s.dot(y) / y.dot(y);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [s, y] = pairs[i];
      const double beta = y.dot(d) / s.dot(y);
      d += (alpha[i] - beta) * s;
    }

    double slope = g.dot(d);
    if (!(slope < 0)) {
      d = -g;
      slope = g.dot(d);
    }

    double step = pairs.empty() ? 1.0 / std::max(1.0, out.gnorm) : 1.0;
    double f_new = kInf;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = out.x + step * d;
      f_new = eval_f(x_new);
      if (std::isfinite(f_new) && f_new <= f + c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no progress possible at this scale

    const Eigen::VectorXd g_new = eval_g(x_new);
    const Eigen::VectorXd s = x_new - out.x;
    const Eigen::VectorXd y = g_new - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      pairs.emplace_back(s, y);
      if (pairs.size() > memory) pairs.pop_front();
    }

    out.x = x_new;
    f = f_new;
    g = g_new;
    out.history.push_back(f);
    out.max_residual = std::max(out.max_residual, prob.constraint_residual(prob.m_of(as_matrix(out.x))));
  }

  out.f = f;
  out.gnorm = g.norm();
  out.iterations = iter;
  out.stat = prob.stationarity(as_matrix(out.x));
  out.converged = out.gnorm <= gtol || out.stat <= gtol;
  return out;
}

// Low-pass initialization for cyclic -> cyclic pairs: subgroup basis row j is
// fed from the parent row with the same (frequency, entry) label at the exact
// restriction scale.
std::optional<Eigen::MatrixXd> cyclic_lowpass_init(const FourierBasis& basis_parent, const FourierBasis& basis_sub,
                                                   const SamplingMatrix& sampling) {
  const Eigen::MatrixXd fp = basis_parent.inverse_real();
  const Eigen::MatrixXd fs = basis_sub.inverse_real();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis_parent.group_order, basis_sub.group_order);
  for (int j = 0; j < basis_sub.group_order; ++j) {
    const BasisRowLabel want = basis_sub.row_labels[j];
    int parent_row = -1;
    for (int i = 0; i < basis_parent.group_order; ++i) {
      const BasisRowLabel& have = basis_parent.row_labels[i];
      if (have.irrep == want.irrep && have.row == want.row && have.col == want.col) {
        parent_row = i;
        break;
      }
    }
    if (parent_row < 0) return std::nullopt;
    double c = 0.0;
    for (int r = 0; r < sampling.rows; ++r) c += fp(sampling.selection[r], parent_row) * fs(r, j);
    if (std::abs(c) < 0.1) return std::nullopt;
    m(parent_row, j) = 1.0 / c;
  }
  return m;
}

Eigen::MatrixXd random_coeffs(int rows, int cols, std::uint64_t seed, double scale) {
  GaussianStream gauss(derive_seed(seed, 0x7a3));
  Eigen::MatrixXd c(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) c(i, j) = scale * gauss.next();
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Invariant-subspace snap.
//
// The basis row labels give the isotypic decomposition: rows of irrep i form
// a block of shape d x mult (irrep row m, copy index c). Tracing the spectral
// projector P_hat = F P F^T over m yields a mult x mult occupancy matrix per
// isotypic whose eigenvectors are the best-aligned irrep copies. Copies are
// then accepted greedily by occupancy, but only when their restriction to the
// subgroup grows the sampled span by the copy's full dimension, which keeps
// the refit map bijective. Returns nothing when no invariant subspace of the
// right dimension satisfies the constraint (e.g. the parent cosine at the
// subgroup Nyquist frequency has no invariant completion).

namespace {

struct ChosenCopy {
  std::vector<std::vector<int>> rows;  // rows[m][c] = parent basis row index
  int d = 1;
  int mult = 1;
  Eigen::VectorXd direction;  // multiplicity-space unit vector
  bool tunable = false;       // single copy of a mult-2 block: direction is free
  int block_id = 0;
};

// Builds the free coefficients for the invariant subspace spanned by the
// chosen copies, re-fit to the reconstruction constraint.
std::optional<Eigen::MatrixXd> assemble_copies(const AntialiasProblem& prob, const FourierBasis& basis_parent,
                                               const FourierBasis& basis_sub, const SamplingMatrix& sampling,
                                               const std::vector<ChosenCopy>& chosen) {
  const int n = prob.signal_dim();
  const int m = prob.subgroup_dim();
  const Eigen::MatrixXd inv = basis_parent.inverse_real();
  Eigen::MatrixXd u(n, m);
  int col = 0;
  for (const ChosenCopy& cp : chosen) {
    for (int r = 0; r < cp.d; ++r) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      for (int c = 0; c < cp.mult; ++c) v += cp.direction[c] * inv.col(cp.rows[r][c]);
      u.col(col++) = v;
    }
  }
  if (col != m) return std::nullopt;
  Eigen::MatrixXd su(m, m);
  for (int j = 0; j < m; ++j) su.row(j) = u.row(sampling.selection[j]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(su, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(m - 1) <= 1e-8 * std::max(1.0, sv(0))) return std::nullopt;
  const Eigen::MatrixXd b_snap = u * svd.solve(basis_sub.inverse_real());
  return prob.coeffs_of(basis_parent.forward_real() * b_snap);
}

std::optional<std::vector<ChosenCopy>> snap_copies(const AntialiasProblem& prob, const Eigen::MatrixXd& coeffs,
                                                   const FourierBasis& basis_parent, const SamplingMatrix& sampling) {
  const int n = prob.signal_dim();
  const int m = prob.subgroup_dim();
  const Eigen::MatrixXd fwd = basis_parent.forward_real();
  const Eigen::MatrixXd inv = basis_parent.inverse_real();
  const Eigen::MatrixXd p_hat = fwd * prob.projector(coeffs) * inv;

  struct Block {
    int d = 0, mult = 0;
    std::vector<std::vector<int>> rows;
  };
  std::map<int, Block> blocks;
  for (int r = 0; r < n; ++r) {
    const BasisRowLabel& lbl = basis_parent.row_labels[r];
    Block& blk = blocks[lbl.irrep];
    blk.d = std::max(blk.d, lbl.row + 1);
    blk.mult = std::max(blk.mult, lbl.col + 1);
    if (static_cast<int>(blk.rows.size()) <= lbl.row) blk.rows.resize(lbl.row + 1);
    if (static_cast<int>(blk.rows[lbl.row].size()) <= lbl.col) blk.rows[lbl.row].resize(lbl.col + 1, -1);
    blk.rows[lbl.row][lbl.col] = r;
  }

  struct Candidate {
    double occupancy;
    ChosenCopy copy;
  };
  std::vector<Candidate> candidates;
  for (const auto& [id, blk] : blocks) {
    Eigen::MatrixXd occ = Eigen::MatrixXd::Zero(blk.mult, blk.mult);
    for (int c1 = 0; c1 < blk.mult; ++c1)
      for (int c2 = 0; c2 < blk.mult; ++c2) {
        double acc = 0.0;
        for (int r = 0; r < blk.d; ++r) acc += p_hat(blk.rows[r][c1], blk.rows[r][c2]);
        occ(c1, c2) = acc / blk.d;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(occ);
    auto push = [&](double value, const Eigen::VectorXd& dir) {
      ChosenCopy cp;
      cp.rows = blk.rows;
      cp.d = blk.d;
      cp.mult = blk.mult;
      cp.direction = dir;
      cp.block_id = id;
      candidates.push_back(Candidate{value, std::move(cp)});
    };
    for (int k = 0; k < blk.mult; ++k) push(es.eigenvalues()[k], es.eigenvectors().col(k));
    // Mixed fallbacks: when the projector touched only part of a copy, the
    // occupancy eigenvectors can restrict with deficient rank while a generic
    // direction would not.
    if (blk.mult == 2) {
      const double isq = 1.0 / std::sqrt(2.0);
      push(-1.0, isq * (es.eigenvectors().col(0) + es.eigenvectors().col(1)));
      push(-1.0, isq * (es.eigenvectors().col(0) - es.eigenvectors().col(1)));
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.occupancy != b.occupancy) return a.occupancy > b.occupancy;
    return a.copy.block_id < b.copy.block_id;
  });

  std::vector<ChosenCopy> chosen;
  Eigen::MatrixXd su(m, m);
  int dims = 0;
  for (const Candidate& cand : candidates) {
    const ChosenCopy& cp = cand.copy;
    if (dims + cp.d > m) continue;
    Eigen::MatrixXd su_try = su;
    for (int r = 0; r < cp.d; ++r) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      for (int c = 0; c < cp.mult; ++c) v += cp.direction[c] * inv.col(cp.rows[r][c]);
      for (int j = 0; j < m; ++j) su_try(j, dims + r) = v[sampling.selection[j]];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> rank_svd(su_try.leftCols(dims + cp.d));
    const auto& rsv = rank_svd.singularValues();
    if (rsv(dims + cp.d - 1) <= 1e-8 * std::max(1.0, rsv(0))) continue;
    su = std::move(su_try);
    chosen.push_back(cp);
    dims += cp.d;
    if (dims == m) break;
  }
  if (dims != m) return std::nullopt;

  // A direction is tunable when its block has multiplicity 2 and only one
  // copy was taken (a fully taken block spans the same subspace regardless).
  std::map<int, int> taken;
  for (const auto& cp : chosen) taken[cp.block_id] += 1;
  for (auto& cp : chosen) cp.tunable = cp.mult == 2 && taken[cp.block_id] == 1;
  return chosen;
}

// Coordinate search over the free copy directions, staying exactly on the
// invariant manifold: each direction is a unit vector (cos t, sin t) with the
// span periodic in pi.
std::optional<Eigen::MatrixXd> refine_on_manifold(const AntialiasProblem& prob, const FourierBasis& basis_parent,
                                                  const FourierBasis& basis_sub, const SamplingMatrix& sampling,
                                                  std::vector<ChosenCopy> chosen) {
  auto objective_at = [&]() {
    const auto c = assemble_copies(prob, basis_parent, basis_sub, sampling, chosen);
    return c ? prob.objective(*c) : kInf;
  };
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (auto& cp : chosen) {
      if (!cp.tunable) continue;
      const Eigen::VectorXd saved = cp.direction;
      double best_theta = std::atan2(saved[1], saved[0]);
      double best_f = objective_at();
      const int grid = 96;
      for (int k = 0; k < grid; ++k) {
        const double theta = k * std::numbers::pi / grid;
        cp.direction << std::cos(theta), std::sin(theta);
        const double f = objective_at();
        if (f < best_f) {
          best_f = f;
          best_theta = theta;
        }
      }
      // Golden-section polish around the winning grid cell.
      const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
      double lo = best_theta - std::numbers::pi / grid, hi = best_theta + std::numbers::pi / grid;
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      auto f_at = [&](double theta) {
        cp.direction << std::cos(theta), std::sin(theta);
        return objective_at();
      };
      double f1 = f_at(x1), f2 = f_at(x2);
      for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = f_at(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = f_at(x2);
        }
      }
      const double theta_star = f1 < f2 ? x1 : x2;
      if (std::min(f1, f2) <= best_f) {
        cp.direction << std::cos(theta_star), std::sin(theta_star);
      } else {
        cp.direction << std::cos(best_theta), std::sin(best_theta);
      }
      if (objective_at() == kInf) cp.direction = saved;
    }
  }
  return assemble_copies(prob, basis_parent, basis_sub, sampling, chosen);
}

}  // namespace

std::optional<Eigen::MatrixXd> equivariant_snap(const AntialiasProblem& prob, const Eigen::MatrixXd& coeffs,
                                                const FourierBasis& basis_parent, const FourierBasis& basis_sub,
                                                const SamplingMatrix& sampling) {
  const auto chosen = snap_copies(prob, coeffs, basis_parent, sampling);
  if (!chosen) return std::nullopt;
  return assemble_copies(prob, basis_parent, basis_sub, sampling, *chosen);
}


BandlimitSolution finalize_solution(BandlimitMap map, const FiniteGroup& group, const SmoothnessWeights& weights,
                                    double lambda, std::uint64_t seed) {
  BandlimitSolution sol = make_solution(std::move(map));
  const ReynoldsAverager avg = make_reynolds(group, sol.map.basis_parent);
  sol.diagnostics.equivariance_objective = equivariance_objective(sol.map.m, sol.map.basis_parent, avg);
  sol.diagnostics.smooth_objective = smooth_objective(sol.map.m, weights);
  sol.diagnostics.equivariance_error = projector_equivariance_error(sol.projector, group);
  sol.diagnostics.lambda = lambda;
  sol.diagnostics.seed = seed;
  return sol;
}

BandlimitSolution solve_M(const FiniteGroup& group, const SubgroupEmbedding& sub, const FourierBasis& basis_parent,
                          const FourierBasis& basis_sub, const SamplingMatrix& sampling,
                          const SmoothnessWeights& weights, const OptimizerConfig& cfg) {
  if (group.order % static_cast<int>(sub.members.size()) != 0) {
    throw std::invalid_argument("solve_M: |G_sub| must divide |G|");
  }
  if (basis_parent.kind != BasisKind::real || basis_sub.kind != BasisKind::real) {
    throw std::invalid_argument("solve_M: the optimizer runs on real bases");
  }
  if (cfg.lambda < 0 || cfg.max_iterations < 1 || cfg.constraint_tol <= 0 || cfg.stationarity_tol <= 0 ||
      cfg.abs_smoothing <= 0) {
    throw std::invalid_argument("solve_M: invalid optimizer configuration");
  }

  AntialiasProblem prob(group, basis_parent, basis_sub, sampling, weights, cfg.lambda, cfg.abs_smoothing);
  const int free_rows = group.order - sampling.rows;
  const int free_cols = sampling.rows;

  // Fully constrained case: the feasible set is a single point.
  if (free_rows == 0) {
    BandlimitSolution sol = finalize_solution(
        make_bandlimit_map(prob.particular(), basis_parent, basis_sub, sampling), group, weights, cfg.lambda, cfg.seed);
    sol.diagnostics.converged = true;
    return sol;
  }

  Eigen::MatrixXd c0 = Eigen::MatrixXd::Zero(free_rows, free_cols);
  switch (cfg.init) {
    case OptimizerConfig::Init::canonical: {
      std::optional<Eigen::MatrixXd> m0;
      if (group.kind == GroupKind::cyclic && sub.induced.kind == GroupKind::cyclic) {
        m0 = cyclic_lowpass_init(basis_parent, basis_sub, sampling);
      }
      c0 = m0 ? prob.coeffs_of(*m0) : random_coeffs(free_rows, free_cols, cfg.seed, 0.05);
      break;
    }
    case OptimizerConfig::Init::random:
      c0 = random_coeffs(free_rows, free_cols, cfg.seed, 0.05);
      break;
    case OptimizerConfig::Init::provided: {
      if (cfg.provided_init.rows() != group.order || cfg.provided_init.cols() != sampling.rows) {
        throw std::invalid_argument("solve_M: provided initial M has the wrong shape");
      }
      if (prob.constraint_residual(cfg.provided_init) > 1e-6) {
        throw std::invalid_argument("solve_M: provided initial M violates the reconstruction constraint");
      }
      c0 = prob.coeffs_of(cfg.provided_init);
      break;
    }
  }

  // Descend from the configured start, then snap onto the nearest exactly
  // invariant feasible subspace, refining both on the invariant manifold and
  // by unconstrained descent (max_iterations caps each descent stage). Among
  // the candidates, exactly equivariant ones take precedence: the penalty is
  // the relaxation of a hard equivariance requirement, so an equivariant
  // solution is the intended one even when a non-equivariant basin scores a
  // lower penalized objective. Ties fall back to the objective value.
  auto as_matrix = [&](const Eigen::VectorXd& v) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), free_rows, free_cols).eval();
  };
  auto as_vector = [&](const Eigen::MatrixXd& m) {
    return Eigen::Map<const Eigen::VectorXd>(m.data(), free_rows * free_cols).eval();
  };
  auto pointwise_outcome = [&](const Eigen::MatrixXd& c) {
    LbfgsOutcome out;
    out.x = as_vector(c);
    out.f = prob.objective(c);
    out.gnorm = as_vector(prob.gradient(c)).norm();
    out.stat = prob.stationarity(c);
    out.converged = out.stat <= cfg.stationarity_tol;
    out.max_residual = prob.constraint_residual(prob.m_of(c));
    out.history = {out.f};
    return out;
  };

  std::vector<LbfgsOutcome> candidates;
  candidates.push_back(lbfgs_minimize(prob, c0, cfg.max_iterations, cfg.stationarity_tol));
  int total_iterations = candidates.back().iterations;
  for (int round = 0; round < 2; ++round) {
    const auto chosen = snap_copies(prob, as_matrix(candidates.back().x), basis_parent, sampling);
    if (!chosen) break;
    const auto refined = refine_on_manifold(prob, basis_parent, basis_sub, sampling, *chosen);
    if (!refined || !std::isfinite(prob.objective(*refined))) break;
    candidates.push_back(pointwise_outcome(*refined));
    LbfgsOutcome descended = lbfgs_minimize(prob, *refined, cfg.max_iterations, cfg.stationarity_tol);
    total_iterations += descended.iterations;
    const bool progress = descended.f < candidates.back().f - 1e-12;
    candidates.push_back(std::move(descended));
    if (!progress) break;
  }

  const double equivariant_tol = 1e-10;
  const LbfgsOutcome* best = nullptr;
  bool best_equivariant = false;
  double max_residual = 0.0;
  for (const auto& cand : candidates) {
    max_residual = std::max(max_residual, cand.max_residual);
    const bool equivariant = prob.equivariance_term(as_matrix(cand.x)) <= equivariant_tol;
    const bool better = !best || (equivariant && !best_equivariant) ||
                        (equivariant == best_equivariant && cand.f < best->f);
    if (better) {
      best = &cand;
      best_equivariant = equivariant;
    }
  }

  const Eigen::MatrixXd m_star = prob.m_of(as_matrix(best->x));
  BandlimitSolution sol = finalize_solution(make_bandlimit_map(m_star, basis_parent, basis_sub, sampling), group,
                                            weights, cfg.lambda, cfg.seed);
  sol.diagnostics.iterations = total_iterations;
  sol.diagnostics.converged = best->converged;
  sol.diagnostics.gradient_norm = best->stat;
  sol.diagnostics.max_iterate_constraint_residual = max_residual;
  sol.diagnostics.objective_history = best->history;
  return sol;
}

}  // namespace groupsample
