#pragma once

#include <cstddef>
#include <cstdint>

#include "npsa/demod.hpp"
#include "npsa/fringe_synth.hpp"
#include "npsa/grid.hpp"

namespace npsa {

/// Per-pixel least-squares fit of a + p cos(theta) + q sin(theta) with the
/// steps known. p = b cos(phi) and q = -b sin(phi) under I = a + b cos(phi + theta).
struct LsqResult {
  Image a_hat;
  Image b_hat;
  WrappedPhase phi_hat;  // invalid where b_hat < 1e-12 max b_hat
  double condition = 0.0;  // 1-norm condition number of the 3x3 normal matrix
};

LsqResult lsq_demodulate(const FringeStack& stack, const PhaseSteps& steps);

/// The least-squares fit as a linear filter: sum_n c_n I_n = p - i q = b e^{i phi}.
DemodCoefficients lsq_coefficients(const PhaseSteps& steps);

struct SnrMeasurement {
  double gain = 0.0;            // measured output SNR over input SNR
  double quadrature_gain = 0.0; // fitted |H(+1)| seen in the clean field
  double noise_power = 0.0;     // mean |A_noisy - A_clean|^2
  double input_variance = 0.0;  // mean squared injected noise
  int trials = 0;
};

/// Monte-Carlo estimate of the SNR gain of a filter on a scene.
///
/// The clean field is fitted as alpha (b/2) e^{-i phi} + beta (b/2) e^{+i phi};
/// alpha is the quadrature response actually realised by the filter on this
/// data. The noise power is measured over `trials` independent realisations
/// seeded from `seed`. The result is |alpha|^2 / (noise_power / input_variance).
SnrMeasurement empirical_snr_gain(const Scene& scene, const PhaseSteps& steps,
                                  const DemodCoefficients& coeffs, double eta, int trials,
                                  std::uint64_t seed = 1);

struct StepEstimate {
  PhaseSteps steps;
  bool surrogate = true;  // always set: this is a diagnostic, not AIA
};

/// Recovers the phase steps (up to a common offset and sign) from a stack
/// and its demodulation coefficients.
///
/// Each mean-removed frame is regressed on (Re A, Im A). For a quadrature
/// filter the fitted phasors are kappa (e^{i theta_n} - m) with m the mean
/// step phasor, so they lie on a circle; the steps are the angles around the
/// fitted circle's center, referenced to frame 0.
StepEstimate estimate_steps(const FringeStack& stack, const DemodCoefficients& coeffs);

}  // namespace npsa
