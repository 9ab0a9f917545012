#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "npsa/demod.hpp"
#include "npsa/fringe_synth.hpp"
#include "npsa/grid.hpp"

namespace npsa {

/// Uniform frequency grid [lo, hi] with the given spacing (hi included when
/// it falls on the grid).
struct FrequencyGrid {
  double lo = -3.5;
  double hi = 3.5;
  double step = 0.005;

  std::vector<double> points() const;
};

inline constexpr int kDefaultHarmonicLimit = 50;

/// Frequency transfer function of a coefficient/step pair and the figures
/// of merit derived from it.
struct FtfReport {
  std::vector<double> omega;
  std::vector<std::complex<double>> response;
  std::complex<double> h_minus1;
  std::complex<double> h_zero;
  std::complex<double> h_plus1;
  double detuning_ratio = 0.0;  // |H(-1)| / |H(+1)|
  double g_snr = 0.0;
  double r_h = 0.0;
  double r_h_tail_bound = 0.0;  // bound on the truncated part of the R_H denominator
  double peak_gain = 0.0;       // max |H| over the grid
  int k_max = kDefaultHarmonicLimit;
  std::size_t taps = 0;

  /// Response divided by |H(+1)|.
  std::vector<std::complex<double>> normalized_response() const;
};

struct QuadratureDiagnostics {
  bool rejects_conjugate = false;   // |H(-1)| / |H(1)| <= tol
  bool rejects_background = false;  // |H(0)| / |H(1)| <= tol
  bool passes_signal = false;       // |H(1)| > tol * max |H| on the grid
  double conjugate_ratio = 0.0;
  double background_ratio = 0.0;
  double signal_gain = 0.0;

  bool quadrature() const noexcept {
    return rejects_conjugate && rejects_background && passes_signal;
  }
};

struct HarmonicRobustness {
  double r_h = 0.0;
  double tail_bound = 0.0;
};

/// H(omega) = sum_n c_n exp(-i theta_n omega), by direct summation.
std::complex<double> transfer(std::span<const std::complex<double>> c,
                              const PhaseSteps& steps, double omega);

FtfReport ftf(const DemodCoefficients& coeffs, const PhaseSteps& steps,
              const FrequencyGrid& grid = {}, int k_max = kDefaultHarmonicLimit);

QuadratureDiagnostics quadrature_check(const FtfReport& report, double tol = 1e-3);

double detuning_ratio(const FtfReport& report);

/// |H(1)|^2 / sum |c_n|^2.
double snr_gain(const DemodCoefficients& coeffs, const PhaseSteps& steps);

/// |H(1)|^2 / sum_{k=2..k_max} (|H(k)|^2 + |H(-k)|^2) / k^2.
HarmonicRobustness harmonic_robustness(const DemodCoefficients& coeffs,
                                       const PhaseSteps& steps,
                                       int k_max = kDefaultHarmonicLimit);

/// arg(1 + (H(-1) / H(1)) exp(-2 i phi)) per pixel.
Image predict_detuning_field(const FtfReport& report, const Image& phase);

}  // namespace npsa
