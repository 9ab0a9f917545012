#pragma once

// Shared helpers and independent reference computations for the test suites.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "npsa/fringe_synth.hpp"
#include "npsa/matrix.hpp"

namespace npsa::test {

inline constexpr double kPi = std::numbers::pi;

inline FringeStack stack_of(std::vector<Image> frames,
                            std::optional<PhaseSteps> steps = std::nullopt) {
  return FringeStack(std::move(frames), std::move(steps));
}

inline Image constant_image(std::size_t w, std::size_t h, double v) { return Image(w, h, v); }

// Largest empty arc between consecutive steps on the circle.
inline double largest_circular_gap(const std::vector<double>& steps) {
  std::vector<double> s;
  for (double v : steps) {
    double r = std::fmod(v, 2.0 * kPi);
    if (r < 0) r += 2.0 * kPi;
    s.push_back(r);
  }
  std::sort(s.begin(), s.end());
  double gap = s.front() + 2.0 * kPi - s.back();
  for (std::size_t i = 1; i < s.size(); ++i) gap = std::max(gap, s[i] - s[i - 1]);
  return gap;
}

// Random step sets not contained in any half circle, with steps at least
// min_sep apart modulo 2*pi.
inline std::vector<double> random_steps(std::mt19937_64& rng, std::size_t n,
                                        double min_sep = 0.25) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  for (;;) {
    std::vector<double> s(n);
    for (double& v : s) v = u(rng);
    bool ok = largest_circular_gap(s) < kPi;
    for (std::size_t i = 0; ok && i < n; ++i) {
      for (std::size_t j = i + 1; ok && j < n; ++j) {
        const double d = std::abs(std::remainder(s[i] - s[j], 2.0 * kPi));
        if (d < min_sep) ok = false;
      }
    }
    if (ok) return s;
  }
}

inline Matrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r; c < n; ++c) m(r, c) = m(c, r) = g(rng);
  }
  return m;
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  }
  return e;
}

// Eigenvalues from Eigen's self-adjoint solver, sorted descending.
inline std::vector<double> reference_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m));
  std::vector<double> v(solver.eigenvalues().data(),
                        solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

inline double max_residual(const Matrix& c, const std::vector<double>& values, const Matrix& vectors) {
  double worst = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    for (std::size_t r = 0; r < c.rows(); ++r) {
      double cv = 0.0;
      for (std::size_t j = 0; j < c.cols(); ++j) cv += c(r, j) * vectors(j, k);
      worst = std::max(worst, std::abs(cv - values[k] * vectors(r, k)));
    }
  }
  return worst;
}

inline double max_orthonormality_error(const Matrix& v) {
  double worst = 0.0;
  for (std::size_t a = 0; a < v.cols(); ++a) {
    for (std::size_t b = 0; b < v.cols(); ++b) {
      double dot = 0.0;
      for (std::size_t r = 0; r < v.rows(); ++r) dot += v(r, a) * v(r, b);
      worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

// Least-squares fit of x^2 / sx^2 + y^2 / sy^2 = 1 (centered, unrotated).
// Returns sy / sx.
inline double ellipse_axis_ratio(const std::vector<std::pair<double, double>>& pts) {
  Eigen::MatrixXd a(pts.size(), 2);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a(static_cast<Eigen::Index>(i), 0) = pts[i].first * pts[i].first;
    a(static_cast<Eigen::Index>(i), 1) = pts[i].second * pts[i].second;
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  return std::sqrt(coef(0) / coef(1));
}

// H(omega) by direct summation, written independently of the library.
inline std::complex<double> ftf_at(const std::vector<std::complex<double>>& c,
                                   const std::vector<double>& theta, double omega) {
  std::complex<double> h{};
  for (std::size_t n = 0; n < c.size(); ++n) h += c[n] * std::polar(1.0, -theta[n] * omega);
  return h;
}

inline double wrap(double v) {
  double r = std::remainder(v, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

// RMS of wrap(a - b) over all pixels.
inline double rms_wrapped_difference(const Image& a, const Image& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = wrap(a[i] - b[i]);
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

inline std::vector<std::complex<double>> uniform_quadrature_taps(std::size_t n) {
  std::vector<std::complex<double>> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    c[k] = std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
  }
  return c;
}

}  // namespace npsa::test
