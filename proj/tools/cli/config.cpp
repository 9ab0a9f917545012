#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "npsa/errors.hpp"

namespace npsa::cli {
namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw InvalidInput("'" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw InvalidInput("'" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  // Empty items are kept so that "0,,1" fails to parse.
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

}  // namespace

Settings parse_settings(const std::string& text) {
  Settings out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput("config line " + std::to_string(number) + " is not key = value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

Settings load_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_settings(text.str());
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_double("steps", item));
  return out;
}

HarmonicSpec parse_harmonics(const std::string& text) {
  HarmonicSpec spec;
  for (const std::string& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw InvalidInput("harmonic '" + item + "' must look like order:amplitude");
    }
    spec.terms.push_back({parse_integer<int>("harmonics", item.substr(0, colon)),
                          parse_double("harmonics", item.substr(colon + 1))});
  }
  spec.validate();
  return spec;
}

SynthConfig build_synth_config(const Settings& settings) {
  SynthConfig cfg;
  std::size_t size = 256;
  std::optional<std::size_t> width, height;

  // The scene preset sets the baseline; individual keys then override it,
  // whatever order they appear in.
  for (const auto& [key, value] : settings) {
    if (key == "scene") cfg.scene_name = value;
    if (key == "size") size = parse_integer<std::size_t>(key, value);
  }
  cfg.scene = canonical_scene(cfg.scene_name, size);

  for (const auto& [key, value] : settings) {
    if (key == "scene" || key == "size") {
      continue;
    } else if (key == "kind") {
      cfg.scene.kind = parse_phase_kind(value);
    } else if (key == "width") {
      width = parse_integer<std::size_t>(key, value);
    } else if (key == "height") {
      height = parse_integer<std::size_t>(key, value);
    } else if (key == "fringes") {
      cfg.scene.fringes = parse_double(key, value);
    } else if (key == "carrier") {
      cfg.scene.carrier = parse_double(key, value);
    } else if (key == "aperture") {
      if (value == "full") {
        cfg.scene.aperture = Aperture::kFull;
      } else if (value == "circular") {
        cfg.scene.aperture = Aperture::kCircular;
      } else {
        throw InvalidInput("aperture must be full or circular");
      }
    } else if (key == "background") {
      cfg.scene.background = parse_double(key, value);
    } else if (key == "modulation") {
      cfg.scene.modulation = parse_double(key, value);
    } else if (key == "preset") {
      cfg.steps = PhaseSteps::preset(value).values();
      cfg.steps_source = value;
    } else if (key == "steps") {
      cfg.steps = parse_number_list(value);
      cfg.steps_source = "explicit";
    } else if (key == "harmonics") {
      cfg.harmonics = parse_harmonics(value);
    } else if (key == "eta") {
      cfg.noise.eta = parse_double(key, value);
    } else if (key == "seed") {
      cfg.noise.seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "quantize") {
      cfg.quantize_bits = parse_integer<int>(key, value);
    } else {
      throw InvalidInput("unknown config key '" + key + "'");
    }
  }
  if (width) cfg.scene.width = *width;
  if (height) cfg.scene.height = *height;

  if (cfg.noise.eta < 0.0) throw InvalidInput("eta must be non-negative");
  if (cfg.quantize_bits != 0 && (cfg.quantize_bits < 1 || cfg.quantize_bits > 16)) {
    throw InvalidInput("quantize must be 0 (off) or 1..16 bits");
  }
  if (cfg.steps.size() < 3) {
    throw InvalidInput("need >= 3 steps (got " + std::to_string(cfg.steps.size()) + ")");
  }
  PhaseSteps(cfg.steps).require_well_posed();
  return cfg;
}

}  // namespace npsa::cli
