#include "npsa/pca_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "npsa/errors.hpp"
#include "npsa/parallel.hpp"

namespace npsa {
namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t p = 0; p < a.rows(); ++p) {
    for (std::size_t q = p + 1; q < a.cols(); ++q) s += 2.0 * a(p, q) * a(p, q);
  }
  return std::sqrt(s);
}

// One Jacobi rotation zeroing a(p, q); accumulates into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
  const double c = 1.0 / std::hypot(t, 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);
  const std::size_t n = a.rows();

  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p);
    const double arq = a(r, q);
    a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
    a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = vrp - s * (vrq + tau * vrp);
    v(r, q) = vrq + s * (vrp - tau * vrq);
  }
}

}  // namespace

Image estimate_background(const FringeStack& stack) {
  if (stack.size() == 0) throw InvalidInput("cannot estimate background of an empty stack");
  Image bg(stack.width(), stack.height());
  const double inv = 1.0 / static_cast<double>(stack.size());
  parallel::for_each_index(stack.height(), [&](std::size_t y) {
    for (std::size_t x = 0; x < stack.width(); ++x) {
      double s = 0.0;
      for (const Image& f : stack.frames()) s += f(x, y);
      bg(x, y) = s * inv;
    }
  });
  return bg;
}

Matrix covariance(const FringeStack& stack, const Image& background) {
  if (stack.size() == 0) throw InvalidInput("cannot compute covariance of an empty stack");
  if (!background.same_shape(stack.width(), stack.height())) {
    throw InvalidInput("background dimensions do not match the frames");
  }
  const std::size_t n = stack.size();
  const std::size_t w = stack.width();
  const std::size_t h = stack.height();
  const std::size_t pairs = n * (n + 1) / 2;

  // partial[row * pairs + pair]: sum over one image row of the product.
  std::vector<double> partial(h * pairs, 0.0);
  parallel::for_each_index(h, [&](std::size_t y) {
    std::vector<double> dev(n);
    double* out = partial.data() + y * pairs;
    for (std::size_t x = 0; x < w; ++x) {
      const double bg = background(x, y);
      for (std::size_t m = 0; m < n; ++m) dev[m] = stack.frame(m)(x, y) - bg;
      std::size_t k = 0;
      for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t j = m; j < n; ++j) out[k++] += dev[m] * dev[j];
      }
    }
  });

  Matrix c(n, n);
  const double inv_pixels = 1.0 / static_cast<double>(w * h);
  std::vector<double> column(h);
  std::size_t k = 0;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t j = m; j < n; ++j, ++k) {
      for (std::size_t y = 0; y < h; ++y) column[y] = partial[y * pairs + k];
      c(m, j) = c(j, m) = parallel::pairwise_sum(column) * inv_pixels;
    }
  }
  return c;
}

EigenDecomposition symmetric_eig(const Matrix& c) {
  const std::size_t n = c.rows();
  if (n == 0 || c.cols() != n) throw InvalidInput("eigensolver needs a non-empty square matrix");
  const double norm = c.frobenius_norm();
  if (!std::isfinite(norm)) throw InvalidInput("matrix has non-finite entries");
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (std::abs(c(p, q) - c(q, p)) > 1e-12 * std::max(norm, 1e-300)) {
        throw InvalidInput("matrix is not symmetric");
      }
    }
  }

  Matrix a(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) a(p, q) = 0.5 * (c(p, q) + c(q, p));
  }
  Matrix v = Matrix::identity(n);

  int sweeps = 0;
  while (off_diagonal_norm(a) > kJacobiTolerance * norm) {
    if (sweeps == kMaxJacobiSweeps) {
      throw DegenerateData("eigensolver did not converge after " +
                           std::to_string(sweeps) + " sweeps");
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
    ++sweeps;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out{std::vector<double>(n), Matrix(n, n), sweeps};
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.values[col] = a(src, src);
    std::size_t pivot = 0;
    for (std::size_t r = 1; r < n; ++r) {
      if (std::abs(v(r, src)) > std::abs(v(pivot, src))) pivot = r;
    }
    const double sign = v(pivot, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, col) = sign * v(r, src);
  }
  return out;
}

PcaBasis pca_basis(const FringeStack& stack) {
  if (stack.size() < 3) {
    throw InvalidInput("PCA demodulation needs >= 3 frames (got " +
                       std::to_string(stack.size()) + ")");
  }
  PcaBasis basis;
  basis.background = estimate_background(stack);
  basis.covariance = covariance(stack, basis.background);
  EigenDecomposition eig = symmetric_eig(basis.covariance);
  if (!(eig.values[0] > 0.0) || eig.values[1] <= kDegenerateComponentRatio * eig.values[0]) {
    throw DegenerateData("degenerate second component");
  }
  basis.eigenvalues = std::move(eig.values);
  basis.eigenvectors = std::move(eig.vectors);
  return basis;
}

}  // namespace npsa
