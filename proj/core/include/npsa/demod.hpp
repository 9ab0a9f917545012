#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "npsa/fringe_synth.hpp"
#include "npsa/grid.hpp"
#include "npsa/pca_core.hpp"

namespace npsa {

enum class CoefficientKind { kPlain, kCorrected, kLeastSquares };
enum class Orientation { kAsIs, kConjugated };

/// Taps c_n of a linear demodulation filter A = sum_n c_n I_n.
struct DemodCoefficients {
  std::vector<std::complex<double>> c;
  CoefficientKind kind = CoefficientKind::kPlain;
  double rho = 1.0;
  Orientation orientation = Orientation::kAsIs;
  // Set when the measured ratio exceeded one and the in-phase and quadrature
  // roles of the two principal components were exchanged.
  bool axes_swapped = false;

  std::size_t size() const noexcept { return c.size(); }
};

using AnalyticField = ComplexImage;

/// Wrapped phase in (-pi, pi] with a validity flag per pixel.
struct WrappedPhase {
  Image values;
  Mask valid;

  std::size_t valid_count() const;
};

struct ErrorStats {
  double rms = 0.0;
  double max_abs = 0.0;
  double piston = 0.0;
  bool conjugated = false;
  std::size_t pixels = 0;
};

inline constexpr double kInvalidMagnitudeRatio = 1e-12;

/// c_n = v0[n] + i v1[n].
DemodCoefficients plain_coefficients(const PcaBasis& basis);

/// c_n = rho v0[n] + i v1[n]. A rho above one swaps the component roles,
/// c_n = (1 / rho) v1[n] + i v0[n], so the stored ratio is always <= 1.
DemodCoefficients corrected_coefficients(const PcaBasis& basis, double rho);

/// Conjugates all taps if needed so that |H(+1)| >= |H(-1)| for the given
/// steps. Flips the orientation flag when it conjugates.
DemodCoefficients orient(DemodCoefficients coeffs, const PhaseSteps& steps);

/// A(x, y) = sum_n c_n I_n(x, y).
AnalyticField demodulate(const FringeStack& stack, const DemodCoefficients& coeffs);

/// rho = sum |Im A| / sum |Re A| over all pixels.
double correction_ratio(const AnalyticField& field);

/// Every stride-th pixel in row-major order, with stride chosen so that at
/// most max_points pairs (re, im) come back.
std::vector<std::pair<double, double>> lissajous(const AnalyticField& field,
                                                 std::size_t max_points);

/// arg A per pixel. Pixels with |A| < 1e-12 max|A| are flagged invalid.
WrappedPhase phase(const AnalyticField& field);

/// Compares a wrapped estimate with a reference phase after removing the
/// best piston, trying both est and -est. Invalid pixels are skipped.
ErrorStats phase_error(const WrappedPhase& est, const Image& truth);

/// Pointwise wrap(s * est - truth - piston) for the variant chosen by
/// phase_error; invalid pixels hold NaN.
Image phase_error_field(const WrappedPhase& est, const Image& truth, const ErrorStats& stats);

double wrap_phase(double v);

}  // namespace npsa
