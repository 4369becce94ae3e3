#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "groupsample/group.hpp"

namespace groupsample {

enum class IrrepKind { complex_valued, real_valued };

/// A unitary irreducible representation as one matrix per group element.
struct Irrep {
  int dim = 1;
  IrrepKind kind = IrrepKind::complex_valued;
  std::vector<Eigen::MatrixXcd> matrices;  // indexed by element
};

/// The n characters of C_n: phi_k(m) = exp(2*pi*i*k*m/n), k ascending.
std::vector<Irrep> irreps_cyclic(int n);

/// The standard irrep table of the dihedral group of order 2n (make_dihedral
/// encoding): trivial and sign characters, two further characters with
/// r -> -1 when n is even, and 2-dim rotation/reflection irreps
///   phi_h(r^k) = Rot(2*pi*h*k/n),  phi_h(s r^k) = diag(1,-1) * Rot(2*pi*h*k/n)
/// for h = 1 .. ceil(n/2)-1. All matrices are real orthogonal.
std::vector<Irrep> irreps_dihedral(int n);

enum class BasisKind { real, complex_valued };

/// Identifies a basis row as entry (m, n) of irrep `irrep`. For cyclic real
/// bases `irrep` is the frequency, m = 0 selects the cosine and m = 1 the
/// sine entry of the real rotation block (its single non-redundant column).
struct BasisRowLabel {
  int irrep;
  int row;
  int col;
};

/// Orthonormal group Fourier basis pair. Row r of `forward` is the function
/// g -> sqrt(d_phi / |G|) * conj(phi^{mn}(g)) for the label of row r, so
/// x_hat = forward * x and x = inverse * x_hat with inverse = forward^dagger.
struct FourierBasis {
  int group_order = 0;
  BasisKind kind = BasisKind::real;
  Eigen::MatrixXcd forward;
  Eigen::MatrixXcd inverse;
  std::vector<BasisRowLabel> row_labels;

  /// Real view of the matrices; throws if the basis has imaginary content.
  Eigen::MatrixXd forward_real() const;
  Eigen::MatrixXd inverse_real() const;
};

/// Real orthonormal basis. Cyclic groups get the classical basis in
/// ascending frequency order: constant, then (cos_k, sin_k) pairs, then the
/// alternating row when n is even. Dihedral groups get all irrep entries,
/// 1-dim irreps first, then 2-dim blocks by ascending rotation index with
/// entries ordered column-major. Throws for unrecognized group tables.
FourierBasis real_fourier_basis(const FiniteGroup& g);

/// Complex orthonormal basis from the complex irreps (the DFT matrix for
/// cyclic groups; dihedral irreps are already real orthogonal).
FourierBasis complex_fourier_basis(const FiniteGroup& g);

Eigen::VectorXcd fourier_forward(const FourierBasis& basis, const Eigen::VectorXcd& signal);
Eigen::VectorXcd fourier_inverse(const FourierBasis& basis, const Eigen::VectorXcd& coeffs);

/// Regular representation (rho(g) x)(u) = x(g^{-1} u) as a permutation:
/// the returned table p satisfies y[p[v]] = x[v] with p[v] = g*v.
std::vector<int> regular_permutation(const FiniteGroup& g, Element a);

/// Dense permutation matrix P(g) with P[g*v, v] = 1.
Eigen::MatrixXd permutation_matrix(const FiniteGroup& g, Element a);

/// The regular representation conjugated into the spectral domain:
/// rho_hat(g) = F * P(g) * F^{-1} for every g.
struct SpectralRep {
  int group_order = 0;
  std::vector<Eigen::MatrixXcd> matrices;
};

SpectralRep spectral_regular_rep(const FourierBasis& basis, const FiniteGroup& g);

}  // namespace groupsample
