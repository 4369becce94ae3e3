#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "groupsample/cayley.hpp"
#include "groupsample/fourier.hpp"
#include "groupsample/group.hpp"
#include "groupsample/sampling.hpp"

namespace groupsample {

/// Group-average of spectral conjugations. Applying it projects a matrix
/// onto the commutant of the regular representation (the equivariant maps);
/// it is idempotent and its output commutes with every rho_hat(g).
struct ReynoldsAverager {
  SpectralRep spectral;
  std::vector<Element> inverse_index;  // inverse_index[g] = g^{-1}
};

ReynoldsAverager make_reynolds(const FiniteGroup& g, const FourierBasis& basis);

/// (1/|G|) sum_g rho_hat(g) X rho_hat(g)^{-1}, the operator form of the
/// Kronecker-product Reynolds matrix applied to vec(X).
Eigen::MatrixXcd reynolds_apply(const ReynoldsAverager& avg, const Eigen::MatrixXcd& x);

/// || P_hat - T_bar(P_hat) ||_F^2 with P_hat = F P_M F^{-1}.
double equivariance_objective(const Eigen::MatrixXd& m, const FourierBasis& basis, const ReynoldsAverager& avg);

/// Combinatorial Laplacian D - A of the symmetrized Cayley graph (0/1
/// adjacency, self-loops dropped).
Eigen::MatrixXd cayley_laplacian(const FiniteGroup& g, const GeneratorSpec& gens);

/// Laplacian quadratic form of each basis function: w_i = Re(b_i^dagger L b_i).
struct SmoothnessWeights {
  Eigen::VectorXd w;
};

SmoothnessWeights smoothness_weights(const FourierBasis& basis, const Eigen::MatrixXd& laplacian);

/// sum_j sum_i w_i |M_ij|: the frequency-weighted selection cost.
double smooth_objective(const Eigen::MatrixXd& m, const SmoothnessWeights& weights);

/// max_g ||P rho(g) - rho(g) P||_F / ||P||_F over the regular representation.
double projector_equivariance_error(const Eigen::MatrixXd& projector, const FiniteGroup& g);

class InfeasibleConstraintError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OptimizerConfig {
  double lambda = 5.0;
  int max_iterations = 4000;  // cap per descent stage; totals are reported
  double constraint_tol = 1e-10;
  double stationarity_tol = 1e-6;
  std::uint64_t seed = 0;
  enum class Init { canonical, random, provided } init = Init::canonical;
  Eigen::MatrixXd provided_init;  // used when init == provided
  double abs_smoothing = 1e-8;    // epsilon in |t| ~ sqrt(t^2 + eps^2)
};

/// The equality-constrained problem with the reconstruction constraint
/// eliminated: M = M_p + Z C over free coefficients C, where M_p is the
/// minimum-norm solution of S F^{-1} M = F_sub^{-1} and Z spans the null
/// space of S F^{-1}. Every M produced here satisfies the constraint to
/// machine precision. Exposed so tests can probe objective and gradient.
class AntialiasProblem {
 public:
  AntialiasProblem(const FiniteGroup& group, const FourierBasis& basis_parent, const FourierBasis& basis_sub,
                   const SamplingMatrix& sampling, const SmoothnessWeights& weights, double lambda,
                   double abs_smoothing = 1e-8);

  int signal_dim() const { return n_; }
  int subgroup_dim() const { return m_; }
  int free_dim() const { return static_cast<int>(null_basis_.cols()) * m_; }

  const Eigen::MatrixXd& particular() const { return particular_; }
  const Eigen::MatrixXd& null_basis() const { return null_basis_; }

  Eigen::MatrixXd m_of(const Eigen::MatrixXd& coeffs) const;
  Eigen::MatrixXd coeffs_of(const Eigen::MatrixXd& m) const;

  /// Penalized objective E(M) + lambda * sum w_i sqrt(M_ij^2 + eps^2);
  /// +inf when B = F^{-1} M is numerically rank deficient.
  double objective(const Eigen::MatrixXd& coeffs) const;
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& coeffs) const;

  double equivariance_term(const Eigen::MatrixXd& coeffs) const;
  Eigen::MatrixXd equivariance_gradient(const Eigen::MatrixXd& coeffs) const;
  Eigen::MatrixXd projector(const Eigen::MatrixXd& coeffs) const;

  /// First-order stationarity of the true penalized objective: the norm of
  /// the minimum-norm subgradient over the free coefficients, with entries
  /// |M_ij| <= 1e-7 treated as zeros whose subgradient ranges over
  /// [-w_i, w_i]. Zero at a genuine stationary point.
  double stationarity(const Eigen::MatrixXd& coeffs) const;

  /// Spatial-domain Reynolds average (1/|G|) sum_g P(g) X P(g)^T; equal to
  /// the spectral form conjugated back, since the basis is unitary.
  Eigen::MatrixXd spatial_reynolds(const Eigen::MatrixXd& x) const;

  double constraint_residual(const Eigen::MatrixXd& m) const;

 private:
  int n_, m_;
  Eigen::MatrixXd inv_, sub_inv_;
  std::vector<int> selection_;
  Eigen::MatrixXd particular_, null_basis_;
  std::vector<std::vector<int>> inv_perms_;  // inv_perms_[g][u] = g^{-1} u
  Eigen::VectorXd w_;
  double lambda_, eps_;
};

/// Nearest exactly invariant feasible point to the current iterate: the
/// spectral projector is traced down to per-isotypic multiplicity occupancy
/// matrices, irrep copies are accepted greedily by occupancy subject to the
/// sampled span growing by each copy's full dimension, and the chosen
/// invariant subspace is re-fit to the reconstruction constraint. Returns
/// nullopt when no invariant subspace of the right dimension satisfies the
/// constraint.
std::optional<Eigen::MatrixXd> equivariant_snap(const AntialiasProblem& prob, const Eigen::MatrixXd& coeffs,
                                                const FourierBasis& basis_parent, const FourierBasis& basis_sub,
                                                const SamplingMatrix& sampling);

/// Minimizes the equivariance penalty plus lambda-weighted smooth-selection
/// penalty over the feasible affine set, then assembles the solution with
/// full diagnostics. Initialization follows cfg.init: `canonical` starts
/// cyclic->cyclic pairs at the low-pass selection and everything else at the
/// minimum-norm point plus a small seeded perturbation. Descent alternates
/// with snaps onto exactly invariant subspaces, and an exactly equivariant
/// candidate is preferred over a lower-objective non-equivariant one; when
/// the preferred point is not stationary this is reported through
/// diagnostics.converged, not an exception.
BandlimitSolution solve_M(const FiniteGroup& group, const SubgroupEmbedding& sub, const FourierBasis& basis_parent,
                          const FourierBasis& basis_sub, const SamplingMatrix& sampling,
                          const SmoothnessWeights& weights, const OptimizerConfig& cfg);

/// Projector/interpolator/diagnostics for an already-built map (used for the
/// closed-form cyclic path and by tests).
BandlimitSolution finalize_solution(BandlimitMap map, const FiniteGroup& group, const SmoothnessWeights& weights,
                                    double lambda, std::uint64_t seed);

}  // namespace groupsample
