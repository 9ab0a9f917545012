#include "npsa/demod.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "npsa/errors.hpp"
#include "npsa/parallel.hpp"
#include "npsa/spectral.hpp"

namespace npsa {
namespace {

void require_basis(const PcaBasis& basis) {
  if (basis.size() < 2 || basis.eigenvectors.rows() != basis.size() ||
      !(basis.eigenvalues[0] > 0.0) ||
      basis.eigenvalues[1] <= kDegenerateComponentRatio * basis.eigenvalues[0]) {
    throw DegenerateData("degenerate second component");
  }
}

// Row-wise partial sums reduced pairwise; deterministic for any worker count.
template <std::size_t K, typename RowFn>
std::array<double, K> reduce_rows(std::size_t rows, RowFn&& row_fn) {
  std::vector<double> partial(rows * K, 0.0);
  parallel::for_each_index(rows, [&](std::size_t y) {
    row_fn(y, std::span<double, K>(partial.data() + y * K, K));
  });
  std::array<double, K> out{};
  std::vector<double> column(rows);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t y = 0; y < rows; ++y) column[y] = partial[y * K + k];
    out[k] = parallel::pairwise_sum(column);
  }
  return out;
}

}  // namespace

double wrap_phase(double v) {
  double r = std::remainder(v, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

std::size_t WrappedPhase::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.values().begin(), valid.values().end(), 1));
}

DemodCoefficients plain_coefficients(const PcaBasis& basis) {
  require_basis(basis);
  DemodCoefficients out;
  out.kind = CoefficientKind::kPlain;
  out.rho = 1.0;
  out.c.resize(basis.size());
  for (std::size_t n = 0; n < basis.size(); ++n) {
    out.c[n] = {basis.eigenvectors(n, 0), basis.eigenvectors(n, 1)};
  }
  return out;
}

DemodCoefficients corrected_coefficients(const PcaBasis& basis, double rho) {
  require_basis(basis);
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidInput("correction ratio must be positive and finite");
  }
  DemodCoefficients out;
  out.kind = CoefficientKind::kCorrected;
  out.c.resize(basis.size());
  std::size_t in_phase = 0;
  std::size_t quadrature = 1;
  if (rho > 1.0) {
    rho = 1.0 / rho;
    std::swap(in_phase, quadrature);
    out.axes_swapped = true;
  }
  out.rho = rho;
  for (std::size_t n = 0; n < basis.size(); ++n) {
    out.c[n] = {rho * basis.eigenvectors(n, in_phase), basis.eigenvectors(n, quadrature)};
  }
  return out;
}

DemodCoefficients orient(DemodCoefficients coeffs, const PhaseSteps& steps) {
  if (coeffs.size() != steps.size()) {
    throw InvalidInput("coefficient count does not match step count");
  }
  if (std::abs(transfer(coeffs.c, steps, 1.0)) < std::abs(transfer(coeffs.c, steps, -1.0))) {
    for (auto& c : coeffs.c) c = std::conj(c);
    coeffs.orientation = coeffs.orientation == Orientation::kAsIs ? Orientation::kConjugated
                                                                  : Orientation::kAsIs;
  }
  return coeffs;
}

AnalyticField demodulate(const FringeStack& stack, const DemodCoefficients& coeffs) {
  if (coeffs.size() != stack.size()) {
    throw InvalidInput("coefficient count (" + std::to_string(coeffs.size()) +
                       ") does not match frame count (" + std::to_string(stack.size()) + ")");
  }
  AnalyticField field(stack.width(), stack.height());
  parallel::for_each_index(stack.height(), [&](std::size_t y) {
    for (std::size_t x = 0; x < stack.width(); ++x) {
      std::complex<double> a{};
      for (std::size_t n = 0; n < coeffs.size(); ++n) a += coeffs.c[n] * stack.frame(n)(x, y);
      field(x, y) = a;
    }
  });
  return field;
}

double correction_ratio(const AnalyticField& field) {
  const auto sums = reduce_rows<2>(field.height(), [&](std::size_t y, std::span<double, 2> out) {
    for (const auto& a : field.row(y)) {
      out[0] += std::abs(a.imag());
      out[1] += std::abs(a.real());
    }
  });
  if (!(sums[1] > 0.0)) throw DegenerateData("degenerate real axis");
  return sums[0] / sums[1];
}

std::vector<std::pair<double, double>> lissajous(const AnalyticField& field,
                                                 std::size_t max_points) {
  std::vector<std::pair<double, double>> points;
  if (max_points == 0 || field.empty()) return points;
  const std::size_t stride = (field.size() + max_points - 1) / max_points;
  points.reserve(field.size() / stride + 1);
  for (std::size_t i = 0; i < field.size(); i += stride) {
    points.emplace_back(field[i].real(), field[i].imag());
  }
  return points;
}

WrappedPhase phase(const AnalyticField& field) {
  double peak = 0.0;
  for (const auto& a : field.values()) peak = std::max(peak, std::abs(a));
  if (!(peak > 0.0)) throw DegenerateData("analytic field is zero everywhere");
  const double floor = kInvalidMagnitudeRatio * peak;

  WrappedPhase out{Image(field.width(), field.height()), Mask(field.width(), field.height())};
  parallel::for_each_index(field.height(), [&](std::size_t y) {
    for (std::size_t x = 0; x < field.width(); ++x) {
      const auto a = field(x, y);
      if (std::abs(a) < floor) {
        out.values(x, y) = 0.0;
        continue;
      }
      double p = std::atan2(a.imag(), a.real());
      if (p == -std::numbers::pi) p = std::numbers::pi;
      out.values(x, y) = p;
      out.valid(x, y) = 1;
    }
  });
  return out;
}

ErrorStats phase_error(const WrappedPhase& est, const Image& truth) {
  if (!est.values.same_shape(truth) || !est.valid.same_shape(truth)) {
    throw InvalidInput("phase map dimensions do not match");
  }
  const std::size_t w = truth.width();

  ErrorStats best;
  best.rms = std::numeric_limits<double>::infinity();
  for (const double sign : {1.0, -1.0}) {
    const auto phasor = reduce_rows<3>(truth.height(), [&](std::size_t y, std::span<double, 3> out) {
      for (std::size_t x = 0; x < w; ++x) {
        if (!est.valid(x, y)) continue;
        const double d = sign * est.values(x, y) - truth(x, y);
        out[0] += std::cos(d);
        out[1] += std::sin(d);
        out[2] += 1.0;
      }
    });
    if (phasor[2] == 0.0) throw DegenerateData("no valid pixels to compare");
    const double piston = std::atan2(phasor[1], phasor[0]);

    std::vector<double> row_max(truth.height(), 0.0);
    const auto err = reduce_rows<1>(truth.height(), [&](std::size_t y, std::span<double, 1> out) {
      for (std::size_t x = 0; x < w; ++x) {
        if (!est.valid(x, y)) continue;
        const double e = wrap_phase(sign * est.values(x, y) - truth(x, y) - piston);
        out[0] += e * e;
        row_max[y] = std::max(row_max[y], std::abs(e));
      }
    });
    const double rms = std::sqrt(err[0] / phasor[2]);
    if (rms < best.rms) {
      best.rms = rms;
      best.max_abs = *std::max_element(row_max.begin(), row_max.end());
      best.piston = wrap_phase(piston);
      best.conjugated = sign < 0.0;
      best.pixels = static_cast<std::size_t>(phasor[2]);
    }
  }
  best.max_abs = std::max(best.max_abs, best.rms);
  return best;
}

Image phase_error_field(const WrappedPhase& est, const Image& truth, const ErrorStats& stats) {
  if (!est.values.same_shape(truth)) throw InvalidInput("phase map dimensions do not match");
  const double sign = stats.conjugated ? -1.0 : 1.0;
  Image out(truth.width(), truth.height(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (est.valid[i]) out[i] = wrap_phase(sign * est.values[i] - truth[i] - stats.piston);
  }
  return out;
}

}  // namespace npsa
