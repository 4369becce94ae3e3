#include "groupsample/fourier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace groupsample {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

Eigen::Matrix2d rot2(double theta) {
  Eigen::Matrix2d m;
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return m;
}

void require_kind(const FiniteGroup& g, const char* who) {
  if (g.kind == GroupKind::generic) {
    throw std::invalid_argument(std::string(who) + ": unsupported group kind for " + g.label +
                                " (only cyclic and dihedral tables are supported)");
  }
}

FourierBasis finalize(FourierBasis basis) {
  basis.inverse = basis.forward.adjoint();
  return basis;
}

// Assembles rows sqrt(d/N) * conj(phi^{mn}(g)) from an irrep list, one block
// per irrep, entries column-major within 2-dim blocks.
FourierBasis basis_from_irreps(const std::vector<Irrep>& irreps, int N, BasisKind kind) {
  FourierBasis basis;
  basis.group_order = N;
  basis.kind = kind;
  basis.forward.resize(N, N);
  int row = 0;
  for (std::size_t i = 0; i < irreps.size(); ++i) {
    const Irrep& phi = irreps[i];
    const double scale = std::sqrt(static_cast<double>(phi.dim) / N);
    for (int c = 0; c < phi.dim; ++c) {
      for (int r = 0; r < phi.dim; ++r) {
        for (int g = 0; g < N; ++g) basis.forward(row, g) = scale * std::conj(phi.matrices[g](r, c));
        basis.row_labels.push_back(BasisRowLabel{static_cast<int>(i), r, c});
        ++row;
      }
    }
  }
  if (row != N) throw std::logic_error("basis_from_irreps: irrep dimensions do not sum to the group order");
  return finalize(std::move(basis));
}

}  // namespace

std::vector<Irrep> irreps_cyclic(int n) {
  if (n < 1) throw std::invalid_argument("irreps_cyclic: n must be >= 1");
  std::vector<Irrep> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    Irrep phi;
    phi.dim = 1;
    phi.kind = IrrepKind::complex_valued;
    phi.matrices.resize(n);
    for (int m = 0; m < n; ++m) {
      const double theta = kTau * k * m / n;
      phi.matrices[m] = Eigen::MatrixXcd::Constant(1, 1, std::complex<double>(std::cos(theta), std::sin(theta)));
    }
    out.push_back(std::move(phi));
  }
  return out;
}

std::vector<Irrep> irreps_dihedral(int n) {
  if (n < 1) throw std::invalid_argument("irreps_dihedral: n must be >= 1");
  const int N = 2 * n;
  std::vector<Irrep> out;

  auto character = [&](auto&& value) {
    Irrep phi;
    phi.dim = 1;
    phi.kind = IrrepKind::real_valued;
    phi.matrices.resize(N);
    for (int a = 0; a < N; ++a) {
      const bool refl = a >= n;
      const int k = refl ? a - n : a;
      phi.matrices[a] = Eigen::MatrixXcd::Constant(1, 1, value(k, refl));
    }
    return phi;
  };

  out.push_back(character([](int, bool) { return 1.0; }));                                      // trivial
  out.push_back(character([](int, bool refl) { return refl ? -1.0 : 1.0; }));                   // sign
  if (n % 2 == 0) {
    out.push_back(character([](int k, bool) { return k % 2 ? -1.0 : 1.0; }));                   // r -> -1, s -> +1
    out.push_back(character([](int k, bool refl) {                                              // r -> -1, s -> -1
      const double v = k % 2 ? -1.0 : 1.0;
      return refl ? -v : v;
    }));
  }

  for (int h = 1; h <= (n - 1) / 2; ++h) {
    Irrep phi;
    phi.dim = 2;
    phi.kind = IrrepKind::real_valued;
    phi.matrices.resize(N);
    const Eigen::Matrix2d refl = (Eigen::Matrix2d() << 1, 0, 0, -1).finished();
    for (int a = 0; a < N; ++a) {
      const bool is_refl = a >= n;
      const int k = is_refl ? a - n : a;
      Eigen::Matrix2d m = rot2(kTau * h * k / n);
      if (is_refl) m = refl * m;
      phi.matrices[a] = m.cast<std::complex<double>>();
    }
    out.push_back(std::move(phi));
  }
  return out;
}

FourierBasis real_fourier_basis(const FiniteGroup& g) {
  require_kind(g, "real_fourier_basis");
  const int N = g.order;

  if (g.kind == GroupKind::dihedral) {
    FourierBasis basis = basis_from_irreps(irreps_dihedral(g.kind_n), N, BasisKind::real);
    return basis;
  }

  // Cyclic: constant, (cos_k, sin_k) for k = 1..ceil(n/2)-1, alternating row
  // for even n. Labels use frequency as the irrep id; cos is entry (0,0) and
  // sin entry (1,0) of the real rotation block.
  FourierBasis basis;
  basis.group_order = N;
  basis.kind = BasisKind::real;
  basis.forward.resize(N, N);
  int row = 0;
  for (int m = 0; m < N; ++m) basis.forward(row, m) = 1.0 / std::sqrt(static_cast<double>(N));
  basis.row_labels.push_back(BasisRowLabel{0, 0, 0});
  ++row;
  const double amp = std::sqrt(2.0 / N);
  for (int k = 1; 2 * k < N; ++k) {
    for (int m = 0; m < N; ++m) basis.forward(row, m) = amp * std::cos(kTau * k * m / N);
    basis.row_labels.push_back(BasisRowLabel{k, 0, 0});
    ++row;
    for (int m = 0; m < N; ++m) basis.forward(row, m) = amp * std::sin(kTau * k * m / N);
    basis.row_labels.push_back(BasisRowLabel{k, 1, 0});
    ++row;
  }
  if (N % 2 == 0) {
    for (int m = 0; m < N; ++m) basis.forward(row, m) = (m % 2 ? -1.0 : 1.0) / std::sqrt(static_cast<double>(N));
    basis.row_labels.push_back(BasisRowLabel{N / 2, 0, 0});
    ++row;
  }
  if (row != N) throw std::logic_error("real_fourier_basis: row count mismatch");
  return finalize(std::move(basis));
}

FourierBasis complex_fourier_basis(const FiniteGroup& g) {
  require_kind(g, "complex_fourier_basis");
  if (g.kind == GroupKind::cyclic) {
    return basis_from_irreps(irreps_cyclic(g.kind_n), g.order, BasisKind::complex_valued);
  }
  return basis_from_irreps(irreps_dihedral(g.kind_n), g.order, BasisKind::complex_valued);
}

Eigen::MatrixXd FourierBasis::forward_real() const {
  if (forward.imag().cwiseAbs().maxCoeff() > 1e-12) {
    throw std::logic_error("FourierBasis: forward matrix is not real");
  }
  return forward.real();
}

Eigen::MatrixXd FourierBasis::inverse_real() const {
  if (inverse.imag().cwiseAbs().maxCoeff() > 1e-12) {
    throw std::logic_error("FourierBasis: inverse matrix is not real");
  }
  return inverse.real();
}

Eigen::VectorXcd fourier_forward(const FourierBasis& basis, const Eigen::VectorXcd& signal) {
  if (signal.size() != basis.group_order) throw std::invalid_argument("fourier_forward: signal length mismatch");
  return basis.forward * signal;
}

Eigen::VectorXcd fourier_inverse(const FourierBasis& basis, const Eigen::VectorXcd& coeffs) {
  if (coeffs.size() != basis.group_order) throw std::invalid_argument("fourier_inverse: coefficient length mismatch");
  return basis.inverse * coeffs;
}

std::vector<int> regular_permutation(const FiniteGroup& g, Element a) {
  std::vector<int> perm(g.order);
  for (Element v = 0; v < g.order; ++v) perm[v] = g.mul[a][v];
  return perm;
}

Eigen::MatrixXd permutation_matrix(const FiniteGroup& g, Element a) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(g.order, g.order);
  const auto perm = regular_permutation(g, a);
  for (Element v = 0; v < g.order; ++v) p(perm[v], v) = 1.0;
  return p;
}

SpectralRep spectral_regular_rep(const FourierBasis& basis, const FiniteGroup& g) {
  if (basis.group_order != g.order) throw std::invalid_argument("spectral_regular_rep: basis/group size mismatch");
  SpectralRep rep;
  rep.group_order = g.order;
  rep.matrices.reserve(g.order);
  for (Element a = 0; a < g.order; ++a) {
    rep.matrices.push_back(basis.forward * permutation_matrix(g, a) * basis.inverse);
  }
  return rep;
}

}  // namespace groupsample
