#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "npsa/demod.hpp"
#include "npsa/oracle.hpp"
#include "npsa/pca_core.hpp"
#include "npsa/spectral.hpp"

namespace npsa::cli {

inline constexpr int kReportSchemaVersion = 1;

/// Finite values pass through; NaN and infinities become null.
nlohmann::json number(double v);
nlohmann::json complex_pair(std::complex<double> z);

nlohmann::json to_json(const PhaseSteps& steps);
nlohmann::json to_json(const PcaBasis& basis);
nlohmann::json to_json(const DemodCoefficients& coeffs);
nlohmann::json to_json(const FtfReport& report);
nlohmann::json to_json(const ErrorStats& stats);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Raw little-endian float64, row-major. Invalid pixels are written as NaN.
void write_phase_f64(const std::filesystem::path& path, const WrappedPhase& phase);
void write_image_f64(const std::filesystem::path& path, const Image& image);
Image read_image_f64(const std::filesystem::path& path, std::size_t width, std::size_t height);

/// Binary PGM (P5). (-pi, pi] maps linearly onto 0..255; invalid pixels are 0.
std::string encode_pgm(const WrappedPhase& phase);

std::string lissajous_csv(const std::vector<std::pair<double, double>>& points);
std::string spectrum_csv(const FtfReport& report);
std::string matrix_csv(const Matrix& m);
std::string eigenpairs_csv(const PcaBasis& basis);

/// One line per method row of a run report.
std::string rows_csv(const nlohmann::json& report);

}  // namespace npsa::cli
