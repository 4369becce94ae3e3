#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

#include "groupsample/fourier.hpp"
#include "groupsample/group.hpp"

namespace groupsample {

/// Row-selection matrix restricting a parent-group signal to a subgroup:
/// row j picks parent index selection[j] (the j-th member in induced order).
struct SamplingMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> selection;

  Eigen::MatrixXd dense() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

SamplingMatrix sampling_matrix(const FiniteGroup& parent, const SubgroupEmbedding& sub);

/// A bandlimit map M tying the subgroup Fourier basis to the parent basis
/// through the reconstruction constraint F_sub^{-1} = S * (F^{-1} M).
/// Real bases only; the complex basis is a diagnostic tool elsewhere.
struct BandlimitMap {
  Eigen::MatrixXd m;  // N x M
  FourierBasis basis_parent;
  FourierBasis basis_sub;
  SamplingMatrix sampling;

  Eigen::MatrixXd span_basis() const;    // B = F^{-1} M
  double constraint_residual() const;    // ||S F^{-1} M - F_sub^{-1}||_F
};

BandlimitMap make_bandlimit_map(Eigen::MatrixXd m, FourierBasis basis_parent, FourierBasis basis_sub,
                                SamplingMatrix sampling);

/// The closed-form bandlimit map for downsampling C_n by 2 (n even): the
/// first n/2 parent basis rows are selected with the exact restriction
/// scale, sqrt(2) on every column except the one feeding the subgroup
/// alternating row (present when 4 | n), which gets 1. Throws on odd n.
BandlimitMap cyclic_canonical_M(int n);

class RankDeficientBasisError : public std::runtime_error {
 public:
  explicit RankDeficientBasisError(std::string msg, Eigen::VectorXd null_direction)
      : std::runtime_error(std::move(msg)), null_direction_(std::move(null_direction)) {}
  const Eigen::VectorXd& null_direction() const { return null_direction_; }

 private:
  Eigen::VectorXd null_direction_;
};

/// P_M = B (B^T B)^{-1} B^T. Throws RankDeficientBasisError when B^T B is
/// numerically singular, carrying an offending null direction.
Eigen::MatrixXd projector_from_M(const BandlimitMap& map);

/// I = (F^{-1} M) F_sub = B F_sub.
Eigen::MatrixXd interpolator_from_M(const BandlimitMap& map);

/// Bandlimit map plus its derived operators and solve diagnostics.
struct BandlimitSolution {
  BandlimitMap map;
  Eigen::MatrixXd projector;     // N x N
  Eigen::MatrixXd interpolator;  // N x M

  struct Diagnostics {
    double constraint_residual = 0.0;
    double equivariance_objective = 0.0;
    double smooth_objective = 0.0;
    double equivariance_error = 0.0;  // max_g ||P rho(g) - rho(g) P||_F / ||P||_F
    double lambda = 0.0;
    std::uint64_t seed = 0;
    int iterations = 0;
    bool converged = true;
    double gradient_norm = 0.0;
    double max_iterate_constraint_residual = 0.0;
    std::vector<double> objective_history;  // accepted iterates, final stage
  } diagnostics;
};

/// Assembles projector/interpolator/constraint residual from a map. The
/// objective diagnostics stay zero until filled in by the optimizer side.
BandlimitSolution make_solution(BandlimitMap map);

struct ReconstructionErrors {
  double with_aa = 0.0;     // max over trials of ||x_tilde - I S x_tilde||_2
  double without_aa = 0.0;  // mean over trials of ||x_tilde - I S x||_2
};

/// Draws standard-normal signals x, anti-aliases them to x_tilde = P x, and
/// measures reconstruction through subsample-then-interpolate. Deterministic
/// for a fixed seed; per-trial streams are derived from the master seed.
ReconstructionErrors verify_reconstruction(const BandlimitSolution& sol, const SamplingMatrix& s, int trials,
                                           std::uint64_t seed);

/// P_M applied to the unit sample at the identity (the anti-aliasing filter).
Eigen::VectorXd filter_response(const BandlimitSolution& sol);

}  // namespace groupsample
