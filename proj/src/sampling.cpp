#include "groupsample/sampling.hpp"

#include <cmath>

#include "groupsample/rng.hpp"

namespace groupsample {

Eigen::MatrixXd SamplingMatrix::dense() const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows, cols);
  for (int j = 0; j < rows; ++j) s(j, selection[j]) = 1.0;
  return s;
}

Eigen::VectorXd SamplingMatrix::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(rows);
  for (int j = 0; j < rows; ++j) out[j] = x[selection[j]];
  return out;
}

SamplingMatrix sampling_matrix(const FiniteGroup& parent, const SubgroupEmbedding& sub) {
  SamplingMatrix s;
  s.rows = static_cast<int>(sub.members.size());
  s.cols = parent.order;
  s.selection.assign(sub.members.begin(), sub.members.end());
  return s;
}

Eigen::MatrixXd BandlimitMap::span_basis() const { return basis_parent.inverse_real() * m; }

double BandlimitMap::constraint_residual() const {
  const Eigen::MatrixXd b = span_basis();
  Eigen::MatrixXd sb(sampling.rows, m.cols());
  for (int j = 0; j < sampling.rows; ++j) sb.row(j) = b.row(sampling.selection[j]);
  return (sb - basis_sub.inverse_real()).norm();
}

BandlimitMap make_bandlimit_map(Eigen::MatrixXd m, FourierBasis basis_parent, FourierBasis basis_sub,
                                SamplingMatrix sampling) {
  if (m.rows() != basis_parent.group_order || m.cols() != basis_sub.group_order) {
    throw std::invalid_argument("make_bandlimit_map: M must be |G| x |G_sub|");
  }
  if (sampling.rows != basis_sub.group_order || sampling.cols != basis_parent.group_order) {
    throw std::invalid_argument("make_bandlimit_map: sampling matrix shape mismatch");
  }
  return BandlimitMap{std::move(m), std::move(basis_parent), std::move(basis_sub), std::move(sampling)};
}

BandlimitMap cyclic_canonical_M(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("cyclic_canonical_M: n must be even and >= 2");
  const FiniteGroup parent = make_cyclic(n);
  std::vector<Element> members;
  for (int k = 0; k < n; k += 2) members.push_back(k);
  const SubgroupEmbedding sub = induced_subgroup(parent, members);

  FourierBasis bp = real_fourier_basis(parent);
  FourierBasis bs = real_fourier_basis(sub.induced);
  SamplingMatrix s = sampling_matrix(parent, sub);

  // Column j feeds subgroup basis row j from parent basis row j; the entry is
  // the reciprocal of the restriction coefficient <S b_j, b'_j>. That gives
  // sqrt(2) everywhere except the column mapping the parent cosine at
  // frequency n/4 onto the subgroup alternating row (it restricts at scale 1).
  const Eigen::MatrixXd fp = bp.inverse_real();
  const Eigen::MatrixXd fs = bs.inverse_real();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n / 2);
  for (int j = 0; j < n / 2; ++j) {
    double c = 0.0;
    for (int r = 0; r < s.rows; ++r) c += fp(s.selection[r], j) * fs(r, j);
    m(j, j) = 1.0 / c;
  }
  return make_bandlimit_map(std::move(m), std::move(bp), std::move(bs), std::move(s));
}

Eigen::MatrixXd projector_from_M(const BandlimitMap& map) {
  const Eigen::MatrixXd b = map.span_basis();
  const Eigen::MatrixXd btb = b.transpose() * b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(btb);
  const double tol = 1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() <= tol) {
    const Eigen::VectorXd null_dir = eig.eigenvectors().col(0);
    throw RankDeficientBasisError(
        "projector_from_M: B^T B is singular; B has a null direction (columns of B are not independent)", null_dir);
  }
  return b * btb.ldlt().solve(b.transpose());
}

Eigen::MatrixXd interpolator_from_M(const BandlimitMap& map) {
  return map.span_basis() * map.basis_sub.forward_real();
}

BandlimitSolution make_solution(BandlimitMap map) {
  BandlimitSolution sol;
  sol.projector = projector_from_M(map);
  sol.interpolator = interpolator_from_M(map);
  sol.diagnostics.constraint_residual = map.constraint_residual();
  sol.map = std::move(map);
  return sol;
}

ReconstructionErrors verify_reconstruction(const BandlimitSolution& sol, const SamplingMatrix& s, int trials,
                                           std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("verify_reconstruction: trials must be >= 1");
  const int n = static_cast<int>(sol.projector.rows());
  ReconstructionErrors errs;
  double sum_without = 0.0;
  for (int t = 0; t < trials; ++t) {
    GaussianStream gauss(derive_seed(seed, static_cast<std::uint64_t>(t)));
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = gauss.next();
    const Eigen::VectorXd x_tilde = sol.projector * x;
    const Eigen::VectorXd up_aa = sol.interpolator * s.apply(x_tilde);
    const Eigen::VectorXd up_raw = sol.interpolator * s.apply(x);
    errs.with_aa = std::max(errs.with_aa, (x_tilde - up_aa).norm());
    sum_without += (x_tilde - up_raw).norm();
  }
  errs.without_aa = sum_without / trials;
  return errs;
}

Eigen::VectorXd filter_response(const BandlimitSolution& sol) {
  return sol.projector.col(0);  // identity is element 0 by construction
}

}  // namespace groupsample
