#pragma once

#include <vector>

#include "npsa/fringe_synth.hpp"
#include "npsa/grid.hpp"
#include "npsa/matrix.hpp"

namespace npsa {

/// Eigenpairs of a real symmetric matrix.
///
/// `values` are sorted descending and `vectors` holds the matching
/// orthonormal eigenvectors as columns. Each column is signed so that its
/// largest-magnitude entry (lowest index on ties) is non-negative.
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
  int sweeps = 0;
};

struct PcaBasis {
  Image background;                 // per-pixel temporal mean of the frames
  Matrix covariance;                // N x N inter-frame covariance
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // columns aligned with eigenvalues

  std::size_t size() const noexcept { return eigenvalues.size(); }
  std::vector<double> component(std::size_t n) const { return eigenvectors.column(n); }
};

inline constexpr int kMaxJacobiSweeps = 100;
inline constexpr double kJacobiTolerance = 1e-14;
inline constexpr double kDegenerateComponentRatio = 1e-9;

Image estimate_background(const FringeStack& stack);

/// C[m][n] = (1 / pixels) sum (I_m - bg)(I_n - bg). Per-row partial sums are
/// combined by pairwise summation, so the result is independent of the
/// worker count.
Matrix covariance(const FringeStack& stack, const Image& background);

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops to
/// 1e-14 of the full norm. Throws InvalidInput for asymmetric input and
/// DegenerateData when 100 sweeps do not converge.
EigenDecomposition symmetric_eig(const Matrix& c);

/// Background, covariance and eigendecomposition of a stack of >= 3 frames.
/// Throws DegenerateData("degenerate second component") when
/// lambda_1 <= 1e-9 lambda_0.
PcaBasis pca_basis(const FringeStack& stack);

}  // namespace npsa
