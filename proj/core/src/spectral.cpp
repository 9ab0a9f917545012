#include "npsa/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "npsa/errors.hpp"
#include "npsa/parallel.hpp"

namespace npsa {
namespace {

void require_matching(const DemodCoefficients& coeffs, const PhaseSteps& steps) {
  if (coeffs.size() != steps.size()) {
    throw InvalidInput("coefficient count (" + std::to_string(coeffs.size()) +
                       ") does not match step count (" + std::to_string(steps.size()) + ")");
  }
}

double tap_energy(const DemodCoefficients& coeffs) {
  double s = 0.0;
  for (const auto& c : coeffs.c) s += std::norm(c);
  return s;
}

double tap_l1(const DemodCoefficients& coeffs) {
  double s = 0.0;
  for (const auto& c : coeffs.c) s += std::abs(c);
  return s;
}

// sum_{k > k_max} 1 / k^2 = pi^2 / 6 - sum_{k <= k_max} 1 / k^2
double inverse_square_tail(int k_max) {
  double head = 0.0;
  for (int k = k_max; k >= 1; --k) head += 1.0 / (static_cast<double>(k) * k);
  return std::max(0.0, std::numbers::pi * std::numbers::pi / 6.0 - head);
}

}  // namespace

std::vector<double> FrequencyGrid::points() const {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidInput("frequency grid needs lo <= hi and a positive step");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  return out;
}

std::vector<std::complex<double>> FtfReport::normalized_response() const {
  const double g = std::abs(h_plus1);
  std::vector<std::complex<double>> out(response);
  if (g > 0.0) {
    for (auto& h : out) h /= g;
  }
  return out;
}

std::complex<double> transfer(std::span<const std::complex<double>> c, const PhaseSteps& steps,
                              double omega) {
  std::complex<double> h{};
  for (std::size_t n = 0; n < c.size(); ++n) {
    h += c[n] * std::polar(1.0, -steps[n] * omega);
  }
  return h;
}

FtfReport ftf(const DemodCoefficients& coeffs, const PhaseSteps& steps, const FrequencyGrid& grid,
              int k_max) {
  require_matching(coeffs, steps);
  FtfReport report;
  report.taps = coeffs.size();
  report.k_max = k_max;
  report.omega = grid.points();
  report.response.resize(report.omega.size());
  parallel::for_each_index(report.omega.size(), [&](std::size_t i) {
    report.response[i] = transfer(coeffs.c, steps, report.omega[i]);
  });
  for (const auto& h : report.response) report.peak_gain = std::max(report.peak_gain, std::abs(h));

  report.h_minus1 = transfer(coeffs.c, steps, -1.0);
  report.h_zero = transfer(coeffs.c, steps, 0.0);
  report.h_plus1 = transfer(coeffs.c, steps, 1.0);
  if (std::abs(report.h_plus1) > 0.0) {
    report.detuning_ratio = detuning_ratio(report);
    report.g_snr = snr_gain(coeffs, steps);
    const HarmonicRobustness rh = harmonic_robustness(coeffs, steps, k_max);
    report.r_h = rh.r_h;
    report.r_h_tail_bound = rh.tail_bound;
  }
  return report;
}

QuadratureDiagnostics quadrature_check(const FtfReport& report, double tol) {
  const double g = std::abs(report.h_plus1);
  if (!(g > 0.0)) throw DegenerateData("no quadrature response");
  // H(+1) must be a non-negligible fraction of the peak response.
  const double scale = std::max(report.peak_gain, g);
  QuadratureDiagnostics d;
  d.conjugate_ratio = std::abs(report.h_minus1) / g;
  d.background_ratio = std::abs(report.h_zero) / g;
  d.signal_gain = g;
  d.rejects_conjugate = d.conjugate_ratio <= tol;
  d.rejects_background = d.background_ratio <= tol;
  d.passes_signal = g > tol * scale;
  return d;
}

double detuning_ratio(const FtfReport& report) {
  const double g = std::abs(report.h_plus1);
  if (!(g > 0.0)) throw DegenerateData("no quadrature response");
  return std::abs(report.h_minus1) / g;
}

double snr_gain(const DemodCoefficients& coeffs, const PhaseSteps& steps) {
  require_matching(coeffs, steps);
  const double energy = tap_energy(coeffs);
  if (!(energy > 0.0)) throw DegenerateData("all coefficients are zero");
  return std::norm(transfer(coeffs.c, steps, 1.0)) / energy;
}

HarmonicRobustness harmonic_robustness(const DemodCoefficients& coeffs, const PhaseSteps& steps,
                                       int k_max) {
  require_matching(coeffs, steps);
  if (k_max < 2) throw InvalidInput("harmonic limit must be >= 2");
  const double signal = std::norm(transfer(coeffs.c, steps, 1.0));
  if (!(signal > 0.0)) throw DegenerateData("no quadrature response");

  double leakage = 0.0;
  for (int k = 2; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    leakage += (std::norm(transfer(coeffs.c, steps, kk)) +
                std::norm(transfer(coeffs.c, steps, -kk))) / (kk * kk);
  }
  HarmonicRobustness out;
  out.r_h = leakage > 0.0 ? signal / leakage : std::numeric_limits<double>::infinity();
  const double l1 = tap_l1(coeffs);
  out.tail_bound = l1 * l1 * 2.0 * inverse_square_tail(k_max);
  return out;
}

Image predict_detuning_field(const FtfReport& report, const Image& phase) {
  const double g = std::abs(report.h_plus1);
  if (!(g > 0.0)) throw DegenerateData("no quadrature response");
  const std::complex<double> r = report.h_minus1 / report.h_plus1;
  Image out(phase.width(), phase.height());
  for (std::size_t i = 0; i < phase.size(); ++i) {
    out[i] = std::arg(1.0 + r * std::polar(1.0, -2.0 * phase[i]));
  }
  return out;
}

}  // namespace npsa
