#include "report.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "npsa/errors.hpp"
#include "npsa/stack_file.hpp"

namespace npsa::cli {
namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::uint8_t> to_bytes(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
  const auto u = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

}  // namespace

nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json complex_pair(std::complex<double> z) {
  return nlohmann::json::array({number(z.real()), number(z.imag())});
}

nlohmann::json to_json(const PhaseSteps& steps) { return steps.values(); }

nlohmann::json to_json(const PcaBasis& basis) {
  nlohmann::json cov = nlohmann::json::array();
  nlohmann::json vecs = nlohmann::json::array();
  for (std::size_t r = 0; r < basis.covariance.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < basis.covariance.cols(); ++c) row.push_back(basis.covariance(r, c));
    cov.push_back(row);
  }
  for (std::size_t c = 0; c < basis.size(); ++c) vecs.push_back(basis.component(c));
  return {{"eigenvalues", basis.eigenvalues}, {"covariance", cov}, {"eigenvectors", vecs}};
}

nlohmann::json to_json(const DemodCoefficients& coeffs) {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& z : coeffs.c) c.push_back(complex_pair(z));
  const char* kind = coeffs.kind == CoefficientKind::kPlain       ? "plain"
                     : coeffs.kind == CoefficientKind::kCorrected ? "corrected"
                                                                  : "least-squares";
  return {{"kind", kind},
          {"rho", number(coeffs.rho)},
          {"orientation", coeffs.orientation == Orientation::kAsIs ? "as-is" : "conjugated"},
          {"axes_swapped", coeffs.axes_swapped},
          {"c", c}};
}

nlohmann::json to_json(const FtfReport& report) {
  const double g = std::abs(report.h_plus1);
  return {{"h_minus1", complex_pair(report.h_minus1)},
          {"h_zero", complex_pair(report.h_zero)},
          {"h_plus1", complex_pair(report.h_plus1)},
          {"abs_h_plus1", number(g)},
          {"normalized_abs_h_minus1", number(g > 0 ? std::abs(report.h_minus1) / g : NAN)},
          {"normalized_abs_h_zero", number(g > 0 ? std::abs(report.h_zero) / g : NAN)},
          {"peak_gain", number(report.peak_gain)},
          {"detuning_ratio", number(report.detuning_ratio)},
          {"g_snr", number(report.g_snr)},
          {"r_h", number(report.r_h)},
          {"r_h_tail_bound", number(report.r_h_tail_bound)},
          {"k_max", report.k_max},
          {"taps", report.taps}};
}

nlohmann::json to_json(const ErrorStats& stats) {
  return {{"rms", number(stats.rms)},
          {"max_abs", number(stats.max_abs)},
          {"piston", number(stats.piston)},
          {"conjugated", stats.conjugated},
          {"pixels", stats.pixels}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, to_bytes(text));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

void write_image_f64(const std::filesystem::path& path, const Image& image) {
  std::vector<std::uint8_t> out;
  out.reserve(image.size() * 8);
  for (double v : image.values()) append_f64(out, v);
  write_file_atomic(path, out);
}

void write_phase_f64(const std::filesystem::path& path, const WrappedPhase& phase) {
  Image masked = phase.values;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    if (!phase.valid[i]) masked[i] = std::numeric_limits<double>::quiet_NaN();
  }
  write_image_f64(path, masked);
}

Image read_image_f64(const std::filesystem::path& path, std::size_t width, std::size_t height) {
  const auto bytes = read_file(path);
  if (bytes.size() != width * height * 8) {
    throw InvalidInput("'" + path.string() + "' does not hold a " + std::to_string(width) + "x" +
                       std::to_string(height) + " float64 image");
  }
  Image out(width, height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    out[i] = std::bit_cast<double>(u);
  }
  return out;
}

std::string encode_pgm(const WrappedPhase& phase) {
  std::string out = "P5\n" + std::to_string(phase.values.width()) + " " +
                    std::to_string(phase.values.height()) + "\n255\n";
  out.reserve(out.size() + phase.values.size());
  for (std::size_t i = 0; i < phase.values.size(); ++i) {
    int level = 0;
    if (phase.valid[i]) {
      const double t = (phase.values[i] + std::numbers::pi) / (2.0 * std::numbers::pi);
      level = static_cast<int>(std::lround(t * 255.0));
    }
    out.push_back(static_cast<char>(std::clamp(level, 0, 255)));
  }
  return out;
}

std::string lissajous_csv(const std::vector<std::pair<double, double>>& points) {
  std::string out = "re,im\n";
  for (const auto& [re, im] : points) out += fmt(re) + "," + fmt(im) + "\n";
  return out;
}

std::string spectrum_csv(const FtfReport& report) {
  std::string out = "omega,re,im,abs\n";
  for (std::size_t i = 0; i < report.omega.size(); ++i) {
    const auto h = report.response[i];
    out += fmt(report.omega[i]) + "," + fmt(h.real()) + "," + fmt(h.imag()) + "," +
           fmt(std::abs(h)) + "\n";
  }
  return out;
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out += (c ? "," : "") + fmt(m(r, c));
    out += "\n";
  }
  return out;
}

std::string eigenpairs_csv(const PcaBasis& basis) {
  std::string out = "index,eigenvalue";
  for (std::size_t n = 0; n < basis.size(); ++n) out += ",v" + std::to_string(n);
  out += "\n";
  for (std::size_t k = 0; k < basis.size(); ++k) {
    out += std::to_string(k) + "," + fmt(basis.eigenvalues[k]);
    for (std::size_t n = 0; n < basis.size(); ++n) out += "," + fmt(basis.eigenvectors(n, k));
    out += "\n";
  }
  return out;
}

std::string rows_csv(const nlohmann::json& report) {
  auto cell = [](const nlohmann::json& j, std::initializer_list<const char*> path) -> std::string {
    const nlohmann::json* node = &j;
    for (const char* key : path) {
      if (!node->is_object() || !node->contains(key)) return "";
      node = &(*node)[key];
    }
    if (node->is_number()) return fmt(node->get<double>());
    if (node->is_boolean()) return node->get<bool>() ? "true" : "false";
    if (node->is_string()) return node->get<std::string>();
    return "";
  };
  std::string out = "method,rho,detuning_ratio,g_snr,r_h,rms_error,max_abs_error\n";
  for (const auto& row : report.at("rows")) {
    out += cell(row, {"method"}) + "," + cell(row, {"coefficients", "rho"}) + "," +
           cell(row, {"ftf", "detuning_ratio"}) + "," + cell(row, {"ftf", "g_snr"}) + "," +
           cell(row, {"ftf", "r_h"}) + "," + cell(row, {"phase_error", "rms"}) + "," +
           cell(row, {"phase_error", "max_abs"}) + "\n";
  }
  return out;
}

}  // namespace npsa::cli
