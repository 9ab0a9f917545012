#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "npsa/fringe_synth.hpp"

namespace npsa::cli {

/// Ordered key=value settings. Later entries override earlier ones.
using Settings = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines. Blank lines and `#` comments are ignored.
Settings parse_settings(const std::string& text);
Settings load_settings(const std::filesystem::path& path);

/// Everything needed to synthesize a stack.
struct SynthConfig {
  std::string scene_name = "tilt-8";
  SceneSpec scene = canonical_scene("tilt-8");
  std::vector<double> steps;
  std::string steps_source;  // preset name or "explicit"
  HarmonicSpec harmonics;
  NoiseSpec noise;
  int quantize_bits = 0;  // 0 keeps float64 intensities
};

/// Recognised keys: scene, kind, size, width, height, fringes, carrier,
/// aperture, background, modulation, preset, steps, harmonics, eta, seed,
/// quantize. Any other key is an error.
SynthConfig build_synth_config(const Settings& settings);

std::vector<double> parse_number_list(const std::string& text);
HarmonicSpec parse_harmonics(const std::string& text);

}  // namespace npsa::cli
