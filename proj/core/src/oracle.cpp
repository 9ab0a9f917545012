#include "npsa/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "npsa/errors.hpp"
#include "npsa/parallel.hpp"
#include "npsa/pca_core.hpp"

namespace npsa {
namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

double norm1(const Mat3& m) {
  double best = 0.0;
  for (int c = 0; c < 3; ++c) {
    best = std::max(best, std::abs(m[0][c]) + std::abs(m[1][c]) + std::abs(m[2][c]));
  }
  return best;
}

// Inverse via the adjugate. Returns false when the determinant is negligible.
bool invert(const Mat3& m, Mat3& inv) {
  inv[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  inv[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  inv[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  inv[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  inv[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  inv[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  inv[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  inv[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  inv[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double det = m[0][0] * inv[0][0] + m[0][1] * inv[1][0] + m[0][2] * inv[2][0];
  const double scale = norm1(m);
  if (!(std::abs(det) > 1e-13 * scale * scale * scale)) return false;
  for (auto& row : inv) {
    for (double& v : row) v /= det;
  }
  return true;
}

// Gaussian elimination with partial pivoting on a small complex system.
template <std::size_t K>
std::array<std::complex<double>, K> solve(std::array<std::array<std::complex<double>, K>, K> m,
                                          std::array<std::complex<double>, K> rhs) {
  for (std::size_t col = 0; col < K; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < K; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) == 0.0) throw DegenerateData("singular regression system");
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = col + 1; r < K; ++r) {
      const auto f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < K; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::array<std::complex<double>, K> x{};
  for (std::size_t i = K; i-- > 0;) {
    auto s = rhs[i];
    for (std::size_t c = i + 1; c < K; ++c) s -= m[i][c] * x[c];
    x[i] = s / m[i][i];
  }
  return x;
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return seed * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL * static_cast<std::uint64_t>(trial + 1);
}

struct NormalSystem {
  std::vector<std::array<double, 3>> basis;  // (1, cos theta_n, sin theta_n)
  Mat3 inverse{};
  double condition = 0.0;
};

NormalSystem normal_system(const PhaseSteps& steps) {
  if (steps.size() < 3) throw InvalidInput("least-squares fit needs >= 3 frames");
  NormalSystem sys;
  Mat3 normal{};
  sys.basis.resize(steps.size());
  for (std::size_t n = 0; n < steps.size(); ++n) {
    sys.basis[n] = {1.0, std::cos(steps[n]), std::sin(steps[n])};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) normal[i][j] += sys.basis[n][i] * sys.basis[n][j];
    }
  }
  if (!invert(normal, sys.inverse)) {
    throw DegenerateData("singular normal matrix (condition = inf); steps are degenerate");
  }
  sys.condition = norm1(normal) * norm1(sys.inverse);
  if (sys.condition > 1e12) {
    std::ostringstream msg;
    msg << "singular normal matrix (condition = " << sys.condition << ")";
    throw DegenerateData(msg.str());
  }
  return sys;
}

}  // namespace

LsqResult lsq_demodulate(const FringeStack& stack, const PhaseSteps& steps) {
  if (steps.size() != stack.size()) {
    throw InvalidInput("step count does not match frame count");
  }
  const NormalSystem sys = normal_system(steps);
  const auto& basis = sys.basis;
  const auto& inv = sys.inverse;
  const double condition = sys.condition;

  const std::size_t w = stack.width();
  const std::size_t h = stack.height();
  LsqResult out{Image(w, h), Image(w, h), {Image(w, h), Mask(w, h)}, condition};
  parallel::for_each_index(h, [&](std::size_t y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::array<double, 3> rhs{};
      for (std::size_t n = 0; n < steps.size(); ++n) {
        const double v = stack.frame(n)(x, y);
        for (int i = 0; i < 3; ++i) rhs[i] += basis[n][i] * v;
      }
      std::array<double, 3> sol{};
      for (int i = 0; i < 3; ++i) {
        sol[i] = inv[i][0] * rhs[0] + inv[i][1] * rhs[1] + inv[i][2] * rhs[2];
      }
      out.a_hat(x, y) = sol[0];
      out.b_hat(x, y) = std::hypot(sol[1], sol[2]);
      double phi = std::atan2(-sol[2], sol[1]);
      if (phi == -std::numbers::pi) phi = std::numbers::pi;
      out.phi_hat.values(x, y) = phi;
    }
  });

  const double peak = *std::max_element(out.b_hat.values().begin(), out.b_hat.values().end());
  for (std::size_t i = 0; i < out.b_hat.size(); ++i) {
    out.phi_hat.valid[i] = peak > 0.0 && out.b_hat[i] >= kInvalidMagnitudeRatio * peak ? 1 : 0;
  }
  return out;
}

DemodCoefficients lsq_coefficients(const PhaseSteps& steps) {
  const NormalSystem sys = normal_system(steps);
  DemodCoefficients out;
  out.kind = CoefficientKind::kLeastSquares;
  out.c.resize(steps.size());
  for (std::size_t n = 0; n < steps.size(); ++n) {
    double p = 0.0, q = 0.0;
    for (int j = 0; j < 3; ++j) {
      p += sys.inverse[1][j] * sys.basis[n][j];
      q += sys.inverse[2][j] * sys.basis[n][j];
    }
    out.c[n] = {p, -q};
  }
  return out;
}

SnrMeasurement empirical_snr_gain(const Scene& scene, const PhaseSteps& steps,
                                  const DemodCoefficients& coeffs, double eta, int trials,
                                  std::uint64_t seed) {
  if (!(eta > 0.0)) throw InvalidInput("empirical SNR needs a positive noise variance");
  if (trials < 1) throw InvalidInput("empirical SNR needs at least one trial");
  if (coeffs.size() != steps.size()) {
    throw InvalidInput("coefficient count does not match step count");
  }

  const FringeStack clean = sample_fringes(scene, steps);
  const AnalyticField clean_field = demodulate(clean, coeffs);
  const std::size_t pixels = clean_field.size();

  // Regressors: quadrature term, conjugate term, background leakage.
  using C = std::complex<double>;
  std::array<std::array<C, 3>, 3> gram{};
  std::array<C, 3> proj{};
  for (std::size_t i = 0; i < pixels; ++i) {
    const double half_b = 0.5 * scene.modulation[i];
    const std::array<C, 3> g{half_b * std::polar(1.0, -scene.phase[i]),
                             half_b * std::polar(1.0, scene.phase[i]),
                             C(scene.background[i], 0.0)};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) gram[r][c] += std::conj(g[r]) * g[c];
      proj[r] += std::conj(g[r]) * clean_field[i];
    }
  }
  const auto fit = solve<3>(gram, proj);

  std::vector<double> noise_power(static_cast<std::size_t>(trials));
  std::vector<double> input_power(static_cast<std::size_t>(trials));
  std::vector<double> scratch(pixels);
  for (int t = 0; t < trials; ++t) {
    const FringeStack noisy = sample_fringes(scene, steps, {}, NoiseSpec{eta, trial_seed(seed, t)});
    const AnalyticField field = demodulate(noisy, coeffs);
    for (std::size_t i = 0; i < pixels; ++i) scratch[i] = std::norm(field[i] - clean_field[i]);
    noise_power[t] = parallel::pairwise_sum(scratch) / static_cast<double>(pixels);

    double injected = 0.0;
    for (std::size_t n = 0; n < noisy.size(); ++n) {
      for (std::size_t i = 0; i < pixels; ++i) {
        const double d = noisy.frame(n)[i] - clean.frame(n)[i];
        scratch[i] = d * d;
      }
      injected += parallel::pairwise_sum(scratch);
    }
    input_power[t] = injected / static_cast<double>(pixels * noisy.size());
  }

  SnrMeasurement m;
  m.trials = trials;
  m.quadrature_gain = std::abs(fit[0]);
  m.noise_power = parallel::pairwise_sum(noise_power) / trials;
  m.input_variance = parallel::pairwise_sum(input_power) / trials;
  if (!(m.noise_power > 0.0)) throw DegenerateData("filter passes no noise");
  m.gain = std::norm(fit[0]) / (m.noise_power / m.input_variance);
  return m;
}

StepEstimate estimate_steps(const FringeStack& stack, const DemodCoefficients& coeffs) {
  if (coeffs.size() != stack.size()) {
    throw InvalidInput("coefficient count does not match frame count");
  }
  if (stack.size() < 3) throw InvalidInput("step estimation needs >= 3 frames");
  double largest = 0.0;
  for (const auto& c : coeffs.c) largest = std::max(largest, std::abs(c));
  for (const auto& c : coeffs.c) {
    if (!(std::abs(c) > 1e-12 * largest)) throw DegenerateData("vanishing demodulation coefficient");
  }

  const AnalyticField field = demodulate(stack, coeffs);
  const Image background = estimate_background(stack);
  const std::size_t pixels = field.size();

  double grr = 0.0, gri = 0.0, gii = 0.0;
  for (std::size_t i = 0; i < pixels; ++i) {
    grr += field[i].real() * field[i].real();
    gri += field[i].real() * field[i].imag();
    gii += field[i].imag() * field[i].imag();
  }
  const double det = grr * gii - gri * gri;
  if (!(det > 1e-14 * (grr * gii))) throw DegenerateData("analytic field has no quadrature content");

  std::vector<std::complex<double>> phasors(stack.size());
  for (std::size_t n = 0; n < stack.size(); ++n) {
    double pr = 0.0, pi = 0.0;
    for (std::size_t i = 0; i < pixels; ++i) {
      const double d = stack.frame(n)[i] - background[i];
      pr += field[i].real() * d;
      pi += field[i].imag() * d;
    }
    phasors[n] = {(gii * pr - gri * pi) / det, (grr * pi - gri * pr) / det};
  }

  // Algebraic circle fit: |z|^2 + D x + E y + F = 0 in the least-squares sense.
  std::array<std::array<std::complex<double>, 3>, 3> normal{};
  std::array<std::complex<double>, 3> rhs{};
  for (const auto& z : phasors) {
    const std::array<double, 3> row{z.real(), z.imag(), 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) normal[r][c] += row[r] * row[c];
      rhs[r] += -std::norm(z) * row[r];
    }
  }
  const auto circle = solve<3>(normal, rhs);
  const std::complex<double> center(-0.5 * circle[0].real(), -0.5 * circle[1].real());

  std::vector<double> theta(stack.size());
  const double origin = std::arg(phasors[0] - center);
  for (std::size_t n = 0; n < stack.size(); ++n) {
    double t = std::fmod(std::arg(phasors[n] - center) - origin, 2.0 * std::numbers::pi);
    if (t < 0.0) t += 2.0 * std::numbers::pi;
    theta[n] = t;
  }
  return StepEstimate{PhaseSteps(std::move(theta)), true};
}

}  // namespace npsa
