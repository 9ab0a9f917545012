#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "config.hpp"
#include "npsa/demod.hpp"
#include "npsa/spectral.hpp"

namespace npsa::cli {

enum class ReportFormat { kJson, kCsv };
enum class Mode { kPlain, kCorrected };

Mode parse_mode(const std::string& text);
std::string_view to_string(Mode mode);

struct GlobalOptions {
  std::filesystem::path out_dir = ".";
  ReportFormat format = ReportFormat::kJson;
  std::optional<std::uint64_t> seed;
};

struct SynthOptions {
  Settings settings;
  std::filesystem::path output = "stack.npsa";
};

struct SynthResult {
  std::filesystem::path stack_path;
  std::filesystem::path truth_path;
  std::filesystem::path meta_path;
  SynthConfig config;
};

struct DemodOptions {
  std::filesystem::path stack;
  Mode mode = Mode::kCorrected;
  std::size_t lissajous_points = 4096;
};

struct AnalyzeOptions {
  std::filesystem::path stack;
  Mode mode = Mode::kCorrected;
  FrequencyGrid grid;
  int k_max = kDefaultHarmonicLimit;
  std::optional<std::vector<double>> steps;
};

struct CompareOptions {
  std::filesystem::path stack;
  std::optional<std::filesystem::path> truth;
  int k_max = kDefaultHarmonicLimit;
};

/// Writes <output>, <stem>.truth.f64 (unwrapped truth phase) and
/// <stem>.meta.json (generation parameters).
SynthResult cmd_synth(const GlobalOptions& global, const SynthOptions& options);

/// Writes phase.f64, phase.pgm, lissajous.csv, covariance.csv,
/// eigenpairs.csv and report.{json,csv} into the output directory.
nlohmann::json cmd_demod(const GlobalOptions& global, const DemodOptions& options);

/// Writes spectrum.csv and ftf.{json,csv}.
nlohmann::json cmd_analyze(const GlobalOptions& global, const AnalyzeOptions& options);

/// Writes compare.{json,csv} with plain, corrected and oracle rows.
nlohmann::json cmd_compare(const GlobalOptions& global, const CompareOptions& options);

}  // namespace npsa::cli
